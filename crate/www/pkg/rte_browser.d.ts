/* tslint:disable */
/* eslint-disable */

export class Absorption {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `Σ w ℓ` over the inflow quadrature against `|ℛ|·|S²| = 16π²/3`.
     */
    fubini_relative_error: number;
    /**
     * Max nodal error of the solver against `e^{-σt}`.
     */
    max_error: number;
    nodes: number;
}

/**
 * One row of the sharpness table, all in log form where values underflow.
 */
export class Sharpness {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    argmax_t: number;
    gap: number;
    k: number;
    l: number;
    log_a: number;
    log_b: number;
    log_lhs: number;
    log_rhs: number;
}

export class Spectral {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `1 - e^{-C}` with `C = sup σ_s ℓ = 2·rate` on the unit ball.
     */
    bound: number;
    rho_1: number;
    rho_2: number;
    rho_inf: number;
}

/**
 * Pure absorption on the unit ball with unit inflow.
 */
export function pure_absorption(grid: number, order: number, boundary: number, sigma: number): Absorption;

export function sharpness(l: number, quadrature_points: number): Sharpness;

/**
 * Power iteration for `ℒ𝒦` with `σ = σ_s = rate` (no absorption) on the
 * unit ball.
 */
export function spectral_radius(grid: number, order: number, rate: number, steps: number, seed: bigint): Spectral;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_absorption_free: (a: number, b: number) => void;
    readonly __wbg_get_absorption_fubini_relative_error: (a: number) => number;
    readonly __wbg_get_absorption_max_error: (a: number) => number;
    readonly __wbg_get_absorption_nodes: (a: number) => number;
    readonly __wbg_get_sharpness_argmax_t: (a: number) => number;
    readonly __wbg_get_sharpness_gap: (a: number) => number;
    readonly __wbg_get_sharpness_k: (a: number) => number;
    readonly __wbg_get_sharpness_l: (a: number) => number;
    readonly __wbg_get_sharpness_log_a: (a: number) => number;
    readonly __wbg_get_sharpness_log_b: (a: number) => number;
    readonly __wbg_get_sharpness_log_lhs: (a: number) => number;
    readonly __wbg_get_sharpness_log_rhs: (a: number) => number;
    readonly __wbg_get_spectral_bound: (a: number) => number;
    readonly __wbg_get_spectral_rho_1: (a: number) => number;
    readonly __wbg_get_spectral_rho_2: (a: number) => number;
    readonly __wbg_get_spectral_rho_inf: (a: number) => number;
    readonly __wbg_set_absorption_fubini_relative_error: (a: number, b: number) => void;
    readonly __wbg_set_absorption_max_error: (a: number, b: number) => void;
    readonly __wbg_set_absorption_nodes: (a: number, b: number) => void;
    readonly __wbg_set_sharpness_argmax_t: (a: number, b: number) => void;
    readonly __wbg_set_sharpness_gap: (a: number, b: number) => void;
    readonly __wbg_set_sharpness_k: (a: number, b: number) => void;
    readonly __wbg_set_sharpness_l: (a: number, b: number) => void;
    readonly __wbg_set_sharpness_log_a: (a: number, b: number) => void;
    readonly __wbg_set_sharpness_log_b: (a: number, b: number) => void;
    readonly __wbg_set_sharpness_log_lhs: (a: number, b: number) => void;
    readonly __wbg_set_sharpness_log_rhs: (a: number, b: number) => void;
    readonly __wbg_set_spectral_bound: (a: number, b: number) => void;
    readonly __wbg_set_spectral_rho_1: (a: number, b: number) => void;
    readonly __wbg_set_spectral_rho_2: (a: number, b: number) => void;
    readonly __wbg_set_spectral_rho_inf: (a: number, b: number) => void;
    readonly __wbg_sharpness_free: (a: number, b: number) => void;
    readonly __wbg_spectral_free: (a: number, b: number) => void;
    readonly pure_absorption: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly sharpness: (a: number, b: number) => [number, number, number];
    readonly spectral_radius: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;

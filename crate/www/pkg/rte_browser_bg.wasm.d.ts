/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_absorption_free: (a: number, b: number) => void;
export const __wbg_get_absorption_fubini_relative_error: (a: number) => number;
export const __wbg_get_absorption_max_error: (a: number) => number;
export const __wbg_get_absorption_nodes: (a: number) => number;
export const __wbg_get_sharpness_argmax_t: (a: number) => number;
export const __wbg_get_sharpness_gap: (a: number) => number;
export const __wbg_get_sharpness_k: (a: number) => number;
export const __wbg_get_sharpness_l: (a: number) => number;
export const __wbg_get_sharpness_log_a: (a: number) => number;
export const __wbg_get_sharpness_log_b: (a: number) => number;
export const __wbg_get_sharpness_log_lhs: (a: number) => number;
export const __wbg_get_sharpness_log_rhs: (a: number) => number;
export const __wbg_get_spectral_bound: (a: number) => number;
export const __wbg_get_spectral_rho_1: (a: number) => number;
export const __wbg_get_spectral_rho_2: (a: number) => number;
export const __wbg_get_spectral_rho_inf: (a: number) => number;
export const __wbg_set_absorption_fubini_relative_error: (a: number, b: number) => void;
export const __wbg_set_absorption_max_error: (a: number, b: number) => void;
export const __wbg_set_absorption_nodes: (a: number, b: number) => void;
export const __wbg_set_sharpness_argmax_t: (a: number, b: number) => void;
export const __wbg_set_sharpness_gap: (a: number, b: number) => void;
export const __wbg_set_sharpness_k: (a: number, b: number) => void;
export const __wbg_set_sharpness_l: (a: number, b: number) => void;
export const __wbg_set_sharpness_log_a: (a: number, b: number) => void;
export const __wbg_set_sharpness_log_b: (a: number, b: number) => void;
export const __wbg_set_sharpness_log_lhs: (a: number, b: number) => void;
export const __wbg_set_sharpness_log_rhs: (a: number, b: number) => void;
export const __wbg_set_spectral_bound: (a: number, b: number) => void;
export const __wbg_set_spectral_rho_1: (a: number, b: number) => void;
export const __wbg_set_spectral_rho_2: (a: number, b: number) => void;
export const __wbg_set_spectral_rho_inf: (a: number, b: number) => void;
export const __wbg_sharpness_free: (a: number, b: number) => void;
export const __wbg_spectral_free: (a: number, b: number) => void;
export const pure_absorption: (a: number, b: number, c: number, d: number) => [number, number, number];
export const sharpness: (a: number, b: number) => [number, number, number];
export const spectral_radius: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;

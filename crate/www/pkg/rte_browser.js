/* @ts-self-types="./rte_browser.d.ts" */

export class Absorption {
    static __wrap(ptr) {
        const obj = Object.create(Absorption.prototype);
        obj.__wbg_ptr = ptr;
        AbsorptionFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        AbsorptionFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_absorption_free(ptr, 0);
    }
    /**
     * `Σ w ℓ` over the inflow quadrature against `|ℛ|·|S²| = 16π²/3`.
     * @returns {number}
     */
    get fubini_relative_error() {
        const ret = wasm.__wbg_get_absorption_fubini_relative_error(this.__wbg_ptr);
        return ret;
    }
    /**
     * Max nodal error of the solver against `e^{-σt}`.
     * @returns {number}
     */
    get max_error() {
        const ret = wasm.__wbg_get_absorption_max_error(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get nodes() {
        const ret = wasm.__wbg_get_absorption_nodes(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * `Σ w ℓ` over the inflow quadrature against `|ℛ|·|S²| = 16π²/3`.
     * @param {number} arg0
     */
    set fubini_relative_error(arg0) {
        wasm.__wbg_set_absorption_fubini_relative_error(this.__wbg_ptr, arg0);
    }
    /**
     * Max nodal error of the solver against `e^{-σt}`.
     * @param {number} arg0
     */
    set max_error(arg0) {
        wasm.__wbg_set_absorption_max_error(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set nodes(arg0) {
        wasm.__wbg_set_absorption_nodes(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) Absorption.prototype[Symbol.dispose] = Absorption.prototype.free;

/**
 * One row of the sharpness table, all in log form where values underflow.
 */
export class Sharpness {
    static __wrap(ptr) {
        const obj = Object.create(Sharpness.prototype);
        obj.__wbg_ptr = ptr;
        SharpnessFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        SharpnessFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_sharpness_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get argmax_t() {
        const ret = wasm.__wbg_get_sharpness_argmax_t(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get gap() {
        const ret = wasm.__wbg_get_sharpness_gap(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get k() {
        const ret = wasm.__wbg_get_sharpness_k(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get l() {
        const ret = wasm.__wbg_get_sharpness_l(this.__wbg_ptr);
        return ret >>> 0;
    }
    /**
     * @returns {number}
     */
    get log_a() {
        const ret = wasm.__wbg_get_sharpness_log_a(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get log_b() {
        const ret = wasm.__wbg_get_sharpness_log_b(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get log_lhs() {
        const ret = wasm.__wbg_get_sharpness_log_lhs(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get log_rhs() {
        const ret = wasm.__wbg_get_sharpness_log_rhs(this.__wbg_ptr);
        return ret;
    }
    /**
     * @param {number} arg0
     */
    set argmax_t(arg0) {
        wasm.__wbg_set_sharpness_argmax_t(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set gap(arg0) {
        wasm.__wbg_set_sharpness_gap(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set k(arg0) {
        wasm.__wbg_set_sharpness_k(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set l(arg0) {
        wasm.__wbg_set_sharpness_l(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set log_a(arg0) {
        wasm.__wbg_set_sharpness_log_a(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set log_b(arg0) {
        wasm.__wbg_set_sharpness_log_b(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set log_lhs(arg0) {
        wasm.__wbg_set_sharpness_log_lhs(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set log_rhs(arg0) {
        wasm.__wbg_set_sharpness_log_rhs(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) Sharpness.prototype[Symbol.dispose] = Sharpness.prototype.free;

export class Spectral {
    static __wrap(ptr) {
        const obj = Object.create(Spectral.prototype);
        obj.__wbg_ptr = ptr;
        SpectralFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        SpectralFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_spectral_free(ptr, 0);
    }
    /**
     * `1 - e^{-C}` with `C = sup σ_s ℓ = 2·rate` on the unit ball.
     * @returns {number}
     */
    get bound() {
        const ret = wasm.__wbg_get_spectral_bound(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get rho_1() {
        const ret = wasm.__wbg_get_spectral_rho_1(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get rho_2() {
        const ret = wasm.__wbg_get_spectral_rho_2(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get rho_inf() {
        const ret = wasm.__wbg_get_spectral_rho_inf(this.__wbg_ptr);
        return ret;
    }
    /**
     * `1 - e^{-C}` with `C = sup σ_s ℓ = 2·rate` on the unit ball.
     * @param {number} arg0
     */
    set bound(arg0) {
        wasm.__wbg_set_spectral_bound(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set rho_1(arg0) {
        wasm.__wbg_set_spectral_rho_1(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set rho_2(arg0) {
        wasm.__wbg_set_spectral_rho_2(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set rho_inf(arg0) {
        wasm.__wbg_set_spectral_rho_inf(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) Spectral.prototype[Symbol.dispose] = Spectral.prototype.free;

/**
 * Pure absorption on the unit ball with unit inflow.
 * @param {number} grid
 * @param {number} order
 * @param {number} boundary
 * @param {number} sigma
 * @returns {Absorption}
 */
export function pure_absorption(grid, order, boundary, sigma) {
    const ret = wasm.pure_absorption(grid, order, boundary, sigma);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Absorption.__wrap(ret[0]);
}

/**
 * @param {number} l
 * @param {number} quadrature_points
 * @returns {Sharpness}
 */
export function sharpness(l, quadrature_points) {
    const ret = wasm.sharpness(l, quadrature_points);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Sharpness.__wrap(ret[0]);
}

/**
 * Power iteration for `ℒ𝒦` with `σ = σ_s = rate` (no absorption) on the
 * unit ball.
 * @param {number} grid
 * @param {number} order
 * @param {number} rate
 * @param {number} steps
 * @param {bigint} seed
 * @returns {Spectral}
 */
export function spectral_radius(grid, order, rate, steps, seed) {
    const ret = wasm.spectral_radius(grid, order, rate, steps, seed);
    if (ret[2]) {
        throw takeFromExternrefTable0(ret[1]);
    }
    return Spectral.__wrap(ret[0]);
}
function __wbg_get_imports() {
    const import0 = {
        __proto__: null,
        __wbg_Error_30c8987f7c2ed4e2: function(arg0, arg1) {
            const ret = Error(getStringFromWasm0(arg0, arg1));
            return ret;
        },
        __wbg___wbindgen_throw_41e9ee4f547fc59a: function(arg0, arg1) {
            throw new Error(getStringFromWasm0(arg0, arg1));
        },
        __wbindgen_init_externref_table: function() {
            const table = wasm.__wbindgen_externrefs;
            const offset = table.grow(4);
            table.set(0, undefined);
            table.set(offset + 0, undefined);
            table.set(offset + 1, null);
            table.set(offset + 2, true);
            table.set(offset + 3, false);
        },
    };
    return {
        __proto__: null,
        "./rte_browser_bg.js": import0,
    };
}

const AbsorptionFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_absorption_free(ptr, 1));
const SharpnessFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_sharpness_free(ptr, 1));
const SpectralFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_spectral_free(ptr, 1));

function getStringFromWasm0(ptr, len) {
    return decodeText(ptr >>> 0, len);
}

let cachedUint8ArrayMemory0 = null;
function getUint8ArrayMemory0() {
    if (cachedUint8ArrayMemory0 === null || cachedUint8ArrayMemory0.byteLength === 0) {
        cachedUint8ArrayMemory0 = new Uint8Array(wasm.memory.buffer);
    }
    return cachedUint8ArrayMemory0;
}

function takeFromExternrefTable0(idx) {
    const value = wasm.__wbindgen_externrefs.get(idx);
    wasm.__externref_table_dealloc(idx);
    return value;
}

let cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
cachedTextDecoder.decode();
const MAX_SAFARI_DECODE_BYTES = 2146435072;
let numBytesDecoded = 0;
function decodeText(ptr, len) {
    numBytesDecoded += len;
    if (numBytesDecoded >= MAX_SAFARI_DECODE_BYTES) {
        cachedTextDecoder = new TextDecoder('utf-8', { ignoreBOM: true, fatal: true });
        cachedTextDecoder.decode();
        numBytesDecoded = len;
    }
    return cachedTextDecoder.decode(getUint8ArrayMemory0().subarray(ptr, ptr + len));
}

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedUint8ArrayMemory0 = null;
    wasm.__wbindgen_start();
    return wasm;
}

async function __wbg_load(module, imports) {
    if (typeof Response === 'function' && module instanceof Response) {
        if (!module.ok) {
            throw new Error(`failed to fetch Wasm: ${module.status} ${module.statusText} fetching '${module.url}'`);
        }

        if (typeof WebAssembly.instantiateStreaming === 'function') {
            try {
                return await WebAssembly.instantiateStreaming(module, imports);
            } catch (e) {
                const validResponse = expectedResponseType(module.type);

                if (validResponse && module.headers.get('Content-Type') !== 'application/wasm') {
                    console.warn("`WebAssembly.instantiateStreaming` failed because your server does not serve Wasm with `application/wasm` MIME type. Falling back to `WebAssembly.instantiate` which is slower. Original error:\n", e);

                } else { throw e; }
            }
        }

        const bytes = await module.arrayBuffer();
        return await WebAssembly.instantiate(bytes, imports);
    } else {
        const instance = await WebAssembly.instantiate(module, imports);

        if (instance instanceof WebAssembly.Instance) {
            return { instance, module };
        } else {
            return instance;
        }
    }

    function expectedResponseType(type) {
        switch (type) {
            case 'basic': case 'cors': case 'default': return true;
        }
        return false;
    }
}

function initSync(module) {
    if (wasm !== undefined) return wasm;


    if (module !== undefined) {
        if (Object.getPrototypeOf(module) === Object.prototype) {
            ({module} = module)
        } else {
            console.warn('using deprecated parameters for `initSync()`; pass a single object instead')
        }
    }

    const imports = __wbg_get_imports();
    if (!(module instanceof WebAssembly.Module)) {
        module = new WebAssembly.Module(module);
    }
    const instance = new WebAssembly.Instance(module, imports);
    return __wbg_finalize_init(instance, module);
}

async function __wbg_init(module_or_path) {
    if (wasm !== undefined) return wasm;


    if (module_or_path !== undefined) {
        if (Object.getPrototypeOf(module_or_path) === Object.prototype) {
            ({module_or_path} = module_or_path)
        } else {
            console.warn('using deprecated parameters for the initialization function; pass a single object instead')
        }
    }

    if (module_or_path === undefined) {
        module_or_path = new URL('rte_browser_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };

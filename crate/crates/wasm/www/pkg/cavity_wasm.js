export class Cavity {
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        CavityFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_cavity_free(ptr, 0);
    }
    /**
     * Mode `index` as `[y0, I0, y1, I1, ...]` with `I = |v|^2` (first
     * component for the coupled doublet), `y` in units of `a`.
     * @param {string} kind
     * @param {number} n
     * @param {number} half_width
     * @param {number} index
     * @returns {Float64Array}
     */
    mode(kind, n, half_width, index) {
        const ptr0 = passStringToWasm0(kind, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
        const len0 = WASM_VECTOR_LEN;
        const ret = wasm.cavity_mode(this.__wbg_ptr, ptr0, len0, n, half_width, index);
        if (ret[3]) {
            throw takeFromExternrefTable0(ret[2]);
        }
        var v2 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v2;
    }
    /**
     * @param {number} mirror_radius
     * @param {number} convex_radius
     * @param {number} half_length
     * @param {number} half_aperture
     * @param {number} wavelength
     */
    constructor(mirror_radius, convex_radius, half_length, half_aperture, wavelength) {
        const ret = wasm.cavity_new(mirror_radius, convex_radius, half_length, half_aperture, wavelength);
        if (ret[2]) {
            throw takeFromExternrefTable0(ret[1]);
        }
        this.__wbg_ptr = ret[0];
        CavityFinalization.register(this, this.__wbg_ptr, this);
        return this;
    }
    /**
     * Eigenvalues in spectral order, interleaved `[re0, im0, re1, im1, ...]`.
     * @param {string} kind
     * @param {number} n
     * @param {number} half_width
     * @returns {Float64Array}
     */
    spectrum(kind, n, half_width) {
        const ptr0 = passStringToWasm0(kind, wasm.__wbindgen_malloc, wasm.__wbindgen_realloc);
        const len0 = WASM_VECTOR_LEN;
        const ret = wasm.cavity_spectrum(this.__wbg_ptr, ptr0, len0, n, half_width);
        if (ret[3]) {
            throw takeFromExternrefTable0(ret[2]);
        }
        var v2 = getArrayF64FromWasm0(ret[0], ret[1]).slice();
        wasm.__wbindgen_free(ret[0], ret[1] * 8, 8);
        return v2;
    }
    /**
     * @returns {CavitySummary}
     */
    summary() {
        const ret = wasm.cavity_summary(this.__wbg_ptr);
        return CavitySummary.__wrap(ret);
    }
}
if (Symbol.dispose) Cavity.prototype[Symbol.dispose] = Cavity.prototype.free;

export class CavitySummary {
    static __wrap(ptr) {
        const obj = Object.create(CavitySummary.prototype);
        obj.__wbg_ptr = ptr;
        CavitySummaryFinalization.register(obj, obj.__wbg_ptr, obj);
        return obj;
    }
    __destroy_into_raw() {
        const ptr = this.__wbg_ptr;
        this.__wbg_ptr = 0;
        CavitySummaryFinalization.unregister(this);
        return ptr;
    }
    free() {
        const ptr = this.__destroy_into_raw();
        wasm.__wbg_cavitysummary_free(ptr, 0);
    }
    /**
     * @returns {number}
     */
    get chirp() {
        const ret = wasm.__wbg_get_cavitysummary_chirp(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get default_half_width() {
        const ret = wasm.__wbg_get_cavitysummary_default_half_width(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get fresnel_number() {
        const ret = wasm.__wbg_get_cavitysummary_fresnel_number(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {number}
     */
    get half_trace() {
        const ret = wasm.__wbg_get_cavitysummary_half_trace(this.__wbg_ptr);
        return ret;
    }
    /**
     * NaN unless the sub-cavity is unstable
     * @returns {number}
     */
    get magnification() {
        const ret = wasm.__wbg_get_cavitysummary_magnification(this.__wbg_ptr);
        return ret;
    }
    /**
     * @returns {boolean}
     */
    get paraxial() {
        const ret = wasm.__wbg_get_cavitysummary_paraxial(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {boolean}
     */
    get subcavity_unstable() {
        const ret = wasm.__wbg_get_cavitysummary_subcavity_unstable(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @returns {boolean}
     */
    get whole_cavity_stable() {
        const ret = wasm.__wbg_get_cavitysummary_whole_cavity_stable(this.__wbg_ptr);
        return ret !== 0;
    }
    /**
     * @param {number} arg0
     */
    set chirp(arg0) {
        wasm.__wbg_set_cavitysummary_chirp(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set default_half_width(arg0) {
        wasm.__wbg_set_cavitysummary_default_half_width(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set fresnel_number(arg0) {
        wasm.__wbg_set_cavitysummary_fresnel_number(this.__wbg_ptr, arg0);
    }
    /**
     * @param {number} arg0
     */
    set half_trace(arg0) {
        wasm.__wbg_set_cavitysummary_half_trace(this.__wbg_ptr, arg0);
    }
    /**
     * NaN unless the sub-cavity is unstable
     * @param {number} arg0
     */
    set magnification(arg0) {
        wasm.__wbg_set_cavitysummary_magnification(this.__wbg_ptr, arg0);
    }
    /**
     * @param {boolean} arg0
     */
    set paraxial(arg0) {
        wasm.__wbg_set_cavitysummary_paraxial(this.__wbg_ptr, arg0);
    }
    /**
     * @param {boolean} arg0
     */
    set subcavity_unstable(arg0) {
        wasm.__wbg_set_cavitysummary_subcavity_unstable(this.__wbg_ptr, arg0);
    }
    /**
     * @param {boolean} arg0
     */
    set whole_cavity_stable(arg0) {
        wasm.__wbg_set_cavitysummary_whole_cavity_stable(this.__wbg_ptr, arg0);
    }
}
if (Symbol.dispose) CavitySummary.prototype[Symbol.dispose] = CavitySummary.prototype.free;
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
        "./cavity_wasm_bg.js": import0,
    };
}

const CavityFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_cavity_free(ptr, 1));
const CavitySummaryFinalization = (typeof FinalizationRegistry === 'undefined')
    ? { register: () => {}, unregister: () => {} }
    : new FinalizationRegistry(ptr => wasm.__wbg_cavitysummary_free(ptr, 1));

function getArrayF64FromWasm0(ptr, len) {
    ptr = ptr >>> 0;
    return getFloat64ArrayMemory0().subarray(ptr / 8, ptr / 8 + len);
}

let cachedFloat64ArrayMemory0 = null;
function getFloat64ArrayMemory0() {
    if (cachedFloat64ArrayMemory0 === null || cachedFloat64ArrayMemory0.byteLength === 0) {
        cachedFloat64ArrayMemory0 = new Float64Array(wasm.memory.buffer);
    }
    return cachedFloat64ArrayMemory0;
}

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

function passStringToWasm0(arg, malloc, realloc) {
    if (realloc === undefined) {
        const buf = cachedTextEncoder.encode(arg);
        const ptr = malloc(buf.length, 1) >>> 0;
        getUint8ArrayMemory0().subarray(ptr, ptr + buf.length).set(buf);
        WASM_VECTOR_LEN = buf.length;
        return ptr;
    }

    let len = arg.length;
    let ptr = malloc(len, 1) >>> 0;

    const mem = getUint8ArrayMemory0();

    let offset = 0;

    for (; offset < len; offset++) {
        const code = arg.charCodeAt(offset);
        if (code > 0x7F) break;
        mem[ptr + offset] = code;
    }
    if (offset !== len) {
        if (offset !== 0) {
            arg = arg.slice(offset);
        }
        ptr = realloc(ptr, len, len = offset + arg.length * 3, 1) >>> 0;
        const view = getUint8ArrayMemory0().subarray(ptr + offset, ptr + len);
        const ret = cachedTextEncoder.encodeInto(arg, view);

        offset += ret.written;
        ptr = realloc(ptr, len, offset, 1) >>> 0;
    }

    WASM_VECTOR_LEN = offset;
    return ptr;
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

const cachedTextEncoder = new TextEncoder();

if (!('encodeInto' in cachedTextEncoder)) {
    cachedTextEncoder.encodeInto = function (arg, view) {
        const buf = cachedTextEncoder.encode(arg);
        view.set(buf);
        return {
            read: arg.length,
            written: buf.length
        };
    };
}

let WASM_VECTOR_LEN = 0;

let wasmModule, wasmInstance, wasm;
function __wbg_finalize_init(instance, module) {
    wasmInstance = instance;
    wasm = instance.exports;
    wasmModule = module;
    cachedFloat64ArrayMemory0 = null;
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
        module_or_path = new URL('cavity_wasm_bg.wasm', import.meta.url);
    }
    const imports = __wbg_get_imports();

    if (typeof module_or_path === 'string' || (typeof Request === 'function' && module_or_path instanceof Request) || (typeof URL === 'function' && module_or_path instanceof URL)) {
        module_or_path = fetch(module_or_path);
    }

    const { instance, module } = await __wbg_load(await module_or_path, imports);

    return __wbg_finalize_init(instance, module);
}

export { initSync, __wbg_init as default };

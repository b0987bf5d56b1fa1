/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `[unstructured, S0, S0 sparse, class, class sparse]` for a solution
     * with relative noise `10^noise_log10`. NaN marks an undefined error.
     */
    backward_errors(noise_log10: number): Float64Array;
    class_name(): string;
    /**
     * Side length of the assembled coefficient matrix.
     */
    dim(): number;
    /**
     * `|𝒜|`, row-major.
     */
    matrix(): Float64Array;
    /**
     * `|Δ𝒜|` of the minimal perturbation, row-major.
     */
    minimal_perturbation(noise_log10: number, structured: boolean, sparse: boolean): Float64Array;
    /**
     * `kind` is `circulant`, `toeplitz` or `sym-toeplitz`.
     */
    constructor(kind: string, n: number, density: number, seed: bigint);
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_backward_errors: (a: number, b: number) => [number, number, number, number];
    readonly demo_class_name: (a: number) => [number, number];
    readonly demo_dim: (a: number) => number;
    readonly demo_matrix: (a: number) => [number, number];
    readonly demo_minimal_perturbation: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly demo_new: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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

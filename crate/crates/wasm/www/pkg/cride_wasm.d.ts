/* tslint:disable */
/* eslint-disable */

/**
 * Taylor series of one preset flow.
 */
export class Flow {
    free(): void;
    [Symbol.dispose](): void;
    constructor(preset: string, n: number, order: number, seed: bigint);
    /**
     * `[xi_sup, lap_a_sup, lap_b_sup, radius]` per order; the radius is
     * NaN where the root test has too few terms.
     */
    norms(): Float64Array;
    order(): number;
    /**
     * Positions `[x1, x2, x3]` at time `t` of a `per_axis × per_axis`
     * lattice of particles in the plane `q3 = z`, wrapped into the box.
     */
    positions(t: number, per_axis: number, z: number): Float64Array;
    /**
     * Estimated radius of convergence in time (infinite for polynomial maps).
     */
    radius(): number;
}

/**
 * Critical `Q` for the bound constant `theta`.
 */
export function qCritical(theta: number): number;

/**
 * `[Q, zeta2, zeta3]` triples on `[0, Q_c)`.
 */
export function zetaCurve(theta: number, samples: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_flow_free: (a: number, b: number) => void;
    readonly flow_new: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly flow_norms: (a: number) => [number, number];
    readonly flow_order: (a: number) => number;
    readonly flow_positions: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly flow_radius: (a: number) => number;
    readonly qCritical: (a: number) => number;
    readonly zetaCurve: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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

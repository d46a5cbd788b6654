/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_flow_free: (a: number, b: number) => void;
export const flow_new: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const flow_norms: (a: number) => [number, number];
export const flow_order: (a: number) => number;
export const flow_positions: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const flow_radius: (a: number) => number;
export const qCritical: (a: number) => number;
export const zetaCurve: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;

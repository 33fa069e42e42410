/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const kl_spectra: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const mmse_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const sync_gain_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const wss_delta: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;

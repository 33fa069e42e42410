/* tslint:disable */
/* eslint-disable */

export function kl_spectra(period: number, delta: number, noise_power: number, grid_points: number): Float64Array;

export function mmse_curves(period: number, delta: number, snr_db: Float64Array, grid_points: number): Float64Array;

export function sync_gain_curve(period: number, snr_db: number, points: number, grid_points: number): Float64Array;

/**
 * Largest delay for which the model is still wide-sense stationary.
 */
export function wss_delta(period: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly kl_spectra: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly mmse_curves: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly sync_gain_curve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly wss_delta: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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

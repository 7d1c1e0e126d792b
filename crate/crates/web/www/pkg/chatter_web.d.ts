/* tslint:disable */
/* eslint-disable */

export class LobeMap {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    boundary_mm(): Float64Array;
    depths_mm(): Float64Array;
    /**
     * Spectral radius, speed-major (`NaN` for failed cells).
     */
    radius(): Float64Array;
    speeds(): Float64Array;
}

/**
 * SLE in µm along the speed axis; `NaN` where the cut chatters.
 */
export function sle_curve(speed_lo: number, speed_hi: number, speed_count: number, depth_mm: number, immersion: number, steps: number, zoh: boolean): Float64Array;

/**
 * Spectral radius over a speed x depth grid.
 */
export function stability_map(speed_lo: number, speed_hi: number, speed_count: number, depth_hi_mm: number, depth_count: number, immersion: number, steps: number, zoh: boolean): LobeMap;

/**
 * Steady-state vibration over one tooth period, interleaved `[x0, y0, x1, y1, ...]` in µm,
 * followed by the SLE in µm as the last element.
 */
export function vibration_profile(speed: number, depth_mm: number, immersion: number, steps: number, zoh: boolean): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_lobemap_free: (a: number, b: number) => void;
    readonly lobemap_boundary_mm: (a: number) => [number, number];
    readonly lobemap_depths_mm: (a: number) => [number, number];
    readonly lobemap_radius: (a: number) => [number, number];
    readonly lobemap_speeds: (a: number) => [number, number];
    readonly sle_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly stability_map: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly vibration_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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

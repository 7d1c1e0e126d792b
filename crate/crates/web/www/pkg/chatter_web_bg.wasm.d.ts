/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_lobemap_free: (a: number, b: number) => void;
export const lobemap_boundary_mm: (a: number) => [number, number];
export const lobemap_depths_mm: (a: number) => [number, number];
export const lobemap_radius: (a: number) => [number, number];
export const lobemap_speeds: (a: number) => [number, number];
export const sle_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const stability_map: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const vibration_profile: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;

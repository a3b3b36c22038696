/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const __wbg_rectified_free: (a: number, b: number) => void;
export const demo_edgeCorners: (a: number, b: number, c: number) => [number, number, number, number];
export const demo_edgeOverlay: (a: number, b: number, c: number) => [number, number, number, number];
export const demo_from_rgba: (a: number, b: number, c: number, d: number) => [number, number, number];
export const demo_height: (a: number) => number;
export const demo_maskCorners: (a: number) => [number, number];
export const demo_new: (a: number) => [number, number, number];
export const demo_obliqueWwr: (a: number) => [number, number];
export const demo_rectify: (a: number, b: number, c: number) => [number, number, number];
export const demo_rgba: (a: number) => [number, number];
export const demo_trueWwr: (a: number) => [number, number];
export const demo_width: (a: number) => number;
export const rectified_height: (a: number) => number;
export const rectified_rgba: (a: number) => [number, number];
export const rectified_width: (a: number) => number;
export const rectified_wwr: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_start: () => void;

/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Corners from straight edges, `[x0, y0, ..., x3, y3]`.
     */
    edgeCorners(low: number, high: number): Float64Array;
    /**
     * Edge map as RGBA: edges white over a dimmed copy of the image.
     */
    edgeOverlay(low: number, high: number): Uint8Array;
    /**
     * An uploaded photo given as RGBA; no labels, so no WWR.
     */
    static from_rgba(data: Uint8Array, width: number, height: number): Demo;
    /**
     * Corners of the building region as `[x0, y0, ..., x3, y3]` (TL, TR,
     * BR, BL), or the image corners when there are no labels.
     */
    maskCorners(): Float64Array;
    /**
     * A synthetic facade with exactly a quarter of its area in windows.
     */
    constructor(recede: number);
    /**
     * Rectifies the image (and labels) to the quad spanned by `corners`.
     */
    rectify(corners: Float64Array): Rectified;
    rgba(): Uint8Array;
    readonly height: number;
    /**
     * WWR counted directly in the oblique view.
     */
    readonly obliqueWwr: number | undefined;
    readonly trueWwr: number | undefined;
    readonly width: number;
}

/**
 * Output of [`Demo::rectify`].
 */
export class Rectified {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    rgba(): Uint8Array;
    readonly height: number;
    readonly width: number;
    /**
     * WWR of the rectified label map; undefined without labels or facade pixels.
     */
    readonly wwr: number | undefined;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly __wbg_rectified_free: (a: number, b: number) => void;
    readonly demo_edgeCorners: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_edgeOverlay: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_from_rgba: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly demo_height: (a: number) => number;
    readonly demo_maskCorners: (a: number) => [number, number];
    readonly demo_new: (a: number) => [number, number, number];
    readonly demo_obliqueWwr: (a: number) => [number, number];
    readonly demo_rectify: (a: number, b: number, c: number) => [number, number, number];
    readonly demo_rgba: (a: number) => [number, number];
    readonly demo_trueWwr: (a: number) => [number, number];
    readonly demo_width: (a: number) => number;
    readonly rectified_height: (a: number) => number;
    readonly rectified_rgba: (a: number) => [number, number];
    readonly rectified_width: (a: number) => number;
    readonly rectified_wwr: (a: number) => [number, number];
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

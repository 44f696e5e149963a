/* tslint:disable */
/* eslint-disable */

/**
 * Doubles a random half-path and checks `μ(F) + μ(F⁻) - μ(loop) = ½ sign Q`.
 */
export function doubling_defect(n: number, trial: number): string;

/**
 * Parses a Novikov element on `M` and pushes it forward to `X`.
 */
export function novikov_pushforward(text: string): string;

/**
 * Index of the rotation `e^{iθt}` on `ℂⁿ` over `[0, duration]`, with its crossings.
 */
export function rotation_index(n: number, theta: number, duration: number, flavor: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly doubling_defect: (a: number, b: number) => [number, number];
    readonly novikov_pushforward: (a: number, b: number) => [number, number];
    readonly rotation_index: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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

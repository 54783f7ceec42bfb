/* tslint:disable */
/* eslint-disable */

/**
 * Sweeps the bound of the outermost modality of `formula_text` over
 * `0..=max` in each of the first two resources (others are `inf`) and
 * reports where it holds at `state`.
 */
export function bound_region(model_json: string, formula_text: string, semantics: string, state: string, max: number): string;

/**
 * Labels `formula` over the model and, if `state` is non-empty and
 * satisfies a bounded until or always formula, lists the plays of a
 * concrete winning strategy.
 */
export function check(model_json: string, formula_text: string, semantics: string, state: string): string;

/**
 * Decides whether `target` (e.g. `p1=2`, empty for the file's own target)
 * is coverable in the net, both directly and through the model checker.
 */
export function petri_coverable(net_json: string, target: string): string;

/**
 * Canonical JSON of a built-in model: `shuttle`, `exchange`, `chain`,
 * `workshop` or `leaky_loop`.
 */
export function sample_model(name: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bound_region: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number];
    readonly check: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
    readonly petri_coverable: (a: number, b: number, c: number, d: number) => [number, number];
    readonly sample_model: (a: number, b: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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

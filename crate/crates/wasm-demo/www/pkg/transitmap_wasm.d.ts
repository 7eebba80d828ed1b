/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `|S| | |V| | |E| | |L| | M`.
     */
    dims(): string;
    /**
     * Loads a line graph JSON document as written by `transitmap extract`.
     */
    static fromGraphJson(text: string): Demo;
    /**
     * `preset` is `star`, `freiburg`, `stuttgart` or `newyork`.
     */
    constructor(preset: string, seed: number);
    /**
     * Optimizes the ordering with variant `B`, `I` or `S` and returns a JSON
     * summary of the result.
     */
    optimize(variant: string): string;
    render(line_width: number, curve: string): string;
    /**
     * Crossings and separations of the current ordering, as JSON.
     */
    score(): string;
    /**
     * Replaces the ordering by a random one.
     */
    shuffle(seed: number): void;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_dims: (a: number) => [number, number];
    readonly demo_fromGraphJson: (a: number, b: number) => [number, number, number];
    readonly demo_new: (a: number, b: number, c: number) => [number, number, number];
    readonly demo_optimize: (a: number, b: number, c: number) => [number, number, number, number];
    readonly demo_render: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly demo_score: (a: number) => [number, number, number, number];
    readonly demo_shuffle: (a: number, b: number) => void;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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

/* tslint:disable */
/* eslint-disable */

/**
 * Two-block synthetic community trained one epoch at a time.
 */
export class TwoBlockDemo {
    free(): void;
    [Symbol.dispose](): void;
    epochs(): number;
    /**
     * Mean within-block item cosine minus mean cross-block cosine.
     */
    gap(): number;
    /**
     * Row-major item-by-item cosine matrix.
     */
    heatmap(): Float64Array;
    item_block(item: number): number;
    items(): number;
    /**
     * Mean loss per completed epoch; NaN for epochs with no pairs.
     */
    losses(): Float64Array;
    constructor(seed: number, dim: number, learning_rate: number, rho: number, negatives: number);
    /**
     * Top-`n` unseen items for `user` as `[item, score, item, score, ...]`.
     */
    recommend(user: number, strategy: string, n: number): Float64Array;
    /**
     * Trains `count` more epochs. The trainer borrows the dataset, so it is
     * rebuilt and replayed from the seed; results equal one continuous run.
     */
    step(count: number): void;
    user_block(user: number): number;
    users(): number;
}

/**
 * Keep probability at each item degree in `degrees` for a log of `total` interactions.
 */
export function keepCurve(degrees: Uint32Array, total: number, rho: number): Float64Array;

/**
 * Analytic then empirical draw frequencies, concatenated (length 2 * items).
 */
export function negativeDistribution(items: number, gamma: number, draws: number, seed: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_twoblockdemo_free: (a: number, b: number) => void;
    readonly keepCurve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly negativeDistribution: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly twoblockdemo_epochs: (a: number) => number;
    readonly twoblockdemo_gap: (a: number) => number;
    readonly twoblockdemo_heatmap: (a: number) => [number, number];
    readonly twoblockdemo_item_block: (a: number, b: number) => number;
    readonly twoblockdemo_items: (a: number) => number;
    readonly twoblockdemo_losses: (a: number) => [number, number];
    readonly twoblockdemo_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly twoblockdemo_recommend: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly twoblockdemo_step: (a: number, b: number) => [number, number];
    readonly twoblockdemo_user_block: (a: number, b: number) => number;
    readonly twoblockdemo_users: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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

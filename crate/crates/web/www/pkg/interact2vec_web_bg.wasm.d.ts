/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_twoblockdemo_free: (a: number, b: number) => void;
export const keepCurve: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const negativeDistribution: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const twoblockdemo_epochs: (a: number) => number;
export const twoblockdemo_gap: (a: number) => number;
export const twoblockdemo_heatmap: (a: number) => [number, number];
export const twoblockdemo_item_block: (a: number, b: number) => number;
export const twoblockdemo_items: (a: number) => number;
export const twoblockdemo_losses: (a: number) => [number, number];
export const twoblockdemo_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const twoblockdemo_recommend: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
export const twoblockdemo_step: (a: number, b: number) => [number, number];
export const twoblockdemo_user_block: (a: number, b: number) => number;
export const twoblockdemo_users: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;

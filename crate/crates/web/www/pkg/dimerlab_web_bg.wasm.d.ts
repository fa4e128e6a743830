/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_disagreement_free: (a: number, b: number) => void;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const disagreement_delta: (a: number) => [number, number];
export const disagreement_left: (a: number) => [number, number];
export const disagreement_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const disagreement_right: (a: number) => [number, number];
export const disagreement_run: (a: number, b: number) => void;
export const disagreement_sealed_anchors: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const simulation_dimers: (a: number) => [number, number];
export const simulation_grid: (a: number, b: number, c: number) => [number, number, number, number];
export const simulation_grid_report: (a: number, b: number, c: number) => [number, number, number, number];
export const simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const simulation_run: (a: number, b: number) => void;
export const simulation_set_beta: (a: number, b: number) => [number, number];
export const simulation_stats: (a: number) => [number, number];
export const transfer_table: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;

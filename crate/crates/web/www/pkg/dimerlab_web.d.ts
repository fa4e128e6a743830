/* tslint:disable */
/* eslint-disable */

/**
 * Two chains with different streams and the same start, for watching
 * their disagreement set and the sealed anchors.
 */
export class Disagreement {
    free(): void;
    [Symbol.dispose](): void;
    delta(): Int32Array;
    left(): Int32Array;
    constructor(width: number, height: number, beta: number, seed: number);
    right(): Int32Array;
    run(sweeps: number): void;
    /**
     * Anchors `[x, y]` whose rectangle of scales `(a_scale, c_scale, n)`
     * is sealed in both configurations.
     */
    sealed_anchors(a_scale: number, c_scale: number, n: number): Int32Array;
}

/**
 * A single Metropolis chain on a torus.
 */
export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    dimers(): Int32Array;
    /**
     * Points of the vertical (or horizontal) order-parameter grid at scale
     * `b`, as `[x, y]` pairs in grid units.
     */
    grid(b: number, vertical: boolean): Int32Array;
    /**
     * Largest-cluster fraction and spanning flags of a grid, as JSON.
     */
    grid_report(b: number, vertical: boolean): string;
    constructor(width: number, height: number, beta: number, lambda: number, a: number, seed: number, packed: boolean);
    run(sweeps: number): void;
    set_beta(beta: number): void;
    stats(): string;
}

/**
 * Spectrum, mesoscopic length and segment partition functions up to
 * `max_len`, as JSON.
 */
export function transfer_table(beta: number, lambda: number, a: number, max_len: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_disagreement_free: (a: number, b: number) => void;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly disagreement_delta: (a: number) => [number, number];
    readonly disagreement_left: (a: number) => [number, number];
    readonly disagreement_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly disagreement_right: (a: number) => [number, number];
    readonly disagreement_run: (a: number, b: number) => void;
    readonly disagreement_sealed_anchors: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly simulation_dimers: (a: number) => [number, number];
    readonly simulation_grid: (a: number, b: number, c: number) => [number, number, number, number];
    readonly simulation_grid_report: (a: number, b: number, c: number) => [number, number, number, number];
    readonly simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly simulation_run: (a: number, b: number) => void;
    readonly simulation_set_beta: (a: number, b: number) => [number, number];
    readonly simulation_stats: (a: number) => [number, number];
    readonly transfer_table: (a: number, b: number, c: number, d: number) => [number, number, number, number];
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

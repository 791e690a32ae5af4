"""Exhaustive classification of primary extended 1-perfect trades.

The engine grows bipartite (n/2)-regular induced subgraphs of the halved
n-cube from a fixed seed, maintaining the complement closure that validity
forces: for n = 2 mod 4 the complement of every word joins the opposite
part, for n = 0 mod 4 the same part.  States carry the two parts as
bitboards over the ambient word universe, per-part FIFO frontiers of words
whose neighborhoods are still open, and a multiplicity.

Processing a frontier word v of one part enumerates, in ascending order,
the ways to complete its neighborhood in the other part: the completion
must contain every existing neighbor, and the new words must be pairwise
nonadjacent, nonadjacent to the whole target part, and nonadjacent to any
word whose neighborhood is already closed.  Complements of the new words
join their forced part.  A state with both frontiers empty is a solution;
solutions are primary by construction (everything grows from the seed).

Isomorph rejection: after a configured number of frontier expansions the
surviving states are canonicalized and merged, summing multiplicities, so
that the final multiplicity-weighted solution count still equals the
number of solutions an unpruned run would find.  In constant-weight mode
states are merged under coordinate permutations, the global complement,
and part swap (the automorphisms of J(n, n/2)); general translations would
not preserve the constant-weight universe and are reserved for the final
equivalence classing.
"""

from __future__ import annotations

import hashlib
import multiprocessing
import os
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from .bitword import complement, format_word, parse_word
from .canonical import CanonicalForm, automorphisms, aut_order_set_permonly, canonical_form, canonical_parts
from .trade_core import EXTENDED, Trade, format_trade, steiner


@dataclass(frozen=True)
class SearchConfig:
    """Parameters of one classification run."""

    n: int
    constant_weight: bool = False
    checkpoint_depths: tuple[int, ...] = ()
    restrict_t0_to: tuple[int, ...] | None = None
    workers: int = 1
    checkpoint_path: str | None = None

    def __post_init__(self) -> None:
        if self.n % 2 or not 4 <= self.n <= 14:
            raise ValueError(f"unsupported length n={self.n}")
        if self.constant_weight and self.n % 4:
            raise ValueError("constant-weight search needs n = 0 mod 4 (self-complementary parts)")
        if self.constant_weight and self.n != 12:
            raise ValueError("constant-weight mode is only validated for n=12")
        depths = tuple(self.checkpoint_depths)
        if list(depths) != sorted(set(depths)) or any(d <= 0 for d in depths):
            raise ValueError(f"checkpoint depths must be increasing positives: {depths}")
        object.__setattr__(self, "checkpoint_depths", depths)
        if self.restrict_t0_to is not None:
            words = tuple(sorted(set(self.restrict_t0_to)))
            object.__setattr__(self, "restrict_t0_to", words)
            if self.checkpoint_depths:
                # equivalence merging is not sound under a membership restriction
                raise ValueError("checkpoints cannot be combined with restrict_t0_to")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @classmethod
    def default_for(cls, n: int, constant_weight: bool = False, **kw) -> "SearchConfig":
        depths = (3, 6) if (constant_weight and n == 12) else ()
        return cls(n=n, constant_weight=constant_weight, checkpoint_depths=depths, **kw)


class SearchContext:
    """Precomputed universe tables for one (n, mode)."""

    def __init__(self, cfg: SearchConfig):
        self.cfg = cfg
        n = cfg.n
        self.n = n
        self.half = n // 2
        if cfg.constant_weight:
            self.words = [w for w in range(1 << n) if w.bit_count() == self.half]
        else:
            self.words = [w for w in range(1 << n) if w.bit_count() % 2 == 0]
        self.index = {w: i for i, w in enumerate(self.words)}
        self.size = len(self.words)
        self.compl = [self.index[complement(w, n)] for w in self.words]
        adj = []
        for w in self.words:
            m = 0
            for i in range(n):
                for j in range(i + 1, n):
                    u = w ^ (1 << i) ^ (1 << j)
                    k = self.index.get(u)
                    if k is not None:
                        m |= 1 << k
            adj.append(m)
        self.adj = adj
        self.same_part_complements = n % 4 == 0
        if cfg.restrict_t0_to is not None:
            mask = 0
            for w in cfg.restrict_t0_to:
                if w not in self.index:
                    raise ValueError(f"restriction word {format_word(w, n)} is outside the universe")
                mask |= 1 << self.index[w]
            self.restrict0 = mask
        else:
            self.restrict0 = None

    def to_words(self, mask: int) -> tuple[int, ...]:
        return tuple(self.words[i] for i in _bits(mask))


_ctx_cache: dict[tuple, SearchContext] = {}


def get_context(cfg: SearchConfig) -> SearchContext:
    key = (cfg.n, cfg.constant_weight, cfg.restrict_t0_to)
    ctx = _ctx_cache.get(key)
    if ctx is None:
        ctx = _ctx_cache[key] = SearchContext(cfg)
    return ctx


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class PartialState:
    """Search node: part bitboards, resolved bitboards, FIFO frontiers of
    universe indices, active frontier part, pops done, multiplicity."""

    t0: int
    t1: int
    r0: int
    r1: int
    f0: tuple[int, ...]
    f1: tuple[int, ...]
    active: int
    pops: int
    mult: int


def seed_state(cfg: SearchConfig) -> PartialState:
    """Fixed-seed starting state; any trade is equivalent to a completion.

    General mode anchors 0^n in T0 with the n/2 adjacent-pair words in T1.
    Constant-weight mode anchors 0^(n/2) 1^(n/2) in T0 with the identity
    matching between its one- and zero-positions as T1 neighbors (all
    matchings are conjugate under the anchor stabilizer).  In restricted
    mode only the anchor is seeded and its neighborhood is searched, since
    matchings are not interchangeable under the stabilizer of a fixed
    Steiner system.
    """
    ctx = get_context(cfg)
    n, half = cfg.n, cfg.n // 2
    if cfg.constant_weight:
        anchor = ((1 << half) - 1) << half
        ai = ctx.index[anchor]
        if ctx.restrict0 is not None:
            if not (ctx.restrict0 >> ai) & 1:
                raise ValueError("anchor word is not in the T0 restriction set")
            t0 = (1 << ai) | (1 << ctx.compl[ai])
            return PartialState(t0, 0, 0, 0, (ai,), (), 0, 0, 1)
        vs = sorted(ctx.index[anchor ^ (1 << i) ^ (1 << (i + half))] for i in range(half))
        t0 = (1 << ai) | (1 << ctx.compl[ai])
        t1 = 0
        for v in vs:
            t1 |= (1 << v) | (1 << ctx.compl[v])
        r0 = t0
        return PartialState(t0, t1, r0, 0, (), tuple(vs), 1, 0, 1)
    if cfg.restrict_t0_to is not None:
        raise ValueError("restrict_t0_to is only supported in constant-weight mode")
    zero = ctx.index[0]
    vs = sorted(ctx.index[0b11 << (2 * i)] for i in range(n // 2))
    if n % 4 == 0:
        t0 = (1 << zero) | (1 << ctx.compl[zero])
        t1 = 0
        for v in vs:
            t1 |= (1 << v) | (1 << ctx.compl[v])
        return PartialState(t0, t1, t0, 0, (), tuple(vs), 1, 0, 1)
    t0 = 1 << zero
    t1 = 1 << ctx.compl[zero]
    for v in vs:
        t1 |= 1 << v
        t0 |= 1 << ctx.compl[v]
    return PartialState(t0, t1, 1 << zero, 1 << ctx.compl[zero], (), tuple(vs), 1, 0, 1)


def _expand(ctx: SearchContext, state: PartialState, budget: int | None,
            out_states: list[PartialState], out_solutions: list[tuple[int, int, int]]) -> None:
    """DFS from state until each path ends (solution) or reaches the pop
    budget (snapshot into out_states).  Solutions are (t0, t1, mult)."""
    adj = ctx.adj
    comp = ctx.compl
    half = ctx.n // 2
    same_part = ctx.same_part_complements
    restrict0 = ctx.restrict0

    def rec(t0: int, t1: int, r0: int, r1: int,
            f0: tuple[int, ...], f1: tuple[int, ...], active: int, pops: int) -> None:
        fa = f0 if active == 0 else f1
        if not fa:
            other = f1 if active == 0 else f0
            if not other:
                out_solutions.append((t0, t1, state.mult))
                return
            rec(t0, t1, r0, r1, f0, f1, 1 - active, pops)
            return
        if budget is not None and pops == budget:
            out_states.append(PartialState(t0, t1, r0, r1, f0, f1, active, pops, state.mult))
            return
        v, rest = fa[0], fa[1:]
        if active == 0:
            i_mask, j_mask = t0, t1
            r_i = r0
        else:
            i_mask, j_mask = t1, t0
            r_i = r1
        ex_mask = adj[v] & j_mask
        ne = ex_mask.bit_count()
        need = half - ne
        if need < 0:
            return
        cand = adj[v] & ~t0 & ~t1
        if restrict0 is not None and active == 1:
            cand &= restrict0
        cands = []
        if need:
            for c in _bits(cand):
                a = adj[c]
                if a & j_mask or a & r_i:
                    continue
                cands.append(c)
            if len(cands) < need:
                return

        vbar = comp[v]
        new_r0, new_r1 = r0, r1
        if active == 0:
            new_r0 |= 1 << v
            if same_part:
                new_r0 |= 1 << vbar
            else:
                new_r1 |= 1 << vbar
        else:
            new_r1 |= 1 << v
            if same_part:
                new_r1 |= 1 << vbar
            else:
                new_r0 |= 1 << vbar

        def place(chosen: tuple[int, ...]) -> None:
            add = 0
            addbar = 0
            for c in chosen:
                add |= 1 << c
                addbar |= 1 << comp[c]
            if active == 0:
                nt1 = t1 | add
                nt0 = t0
                if same_part:
                    nt1 |= addbar
                else:
                    nt0 = t0 | addbar
                rec(nt0, nt1, new_r0, new_r1, rest, f1 + chosen, active, pops + 1)
            else:
                nt0 = t0 | add
                nt1 = t1
                if same_part:
                    nt0 |= addbar
                else:
                    nt1 = t1 | addbar
                rec(nt0, nt1, new_r0, new_r1, f0 + chosen, rest, active, pops + 1)

        if need == 0:
            place(())
            return

        m = len(cands)

        def choose(idx: int, left: int, blocked: int, chosen: tuple[int, ...]) -> None:
            if left == 0:
                place(chosen)
                return
            for k in range(idx, m - left + 1):
                c = cands[k]
                b = 1 << c
                if blocked & b:
                    continue
                choose(k + 1, left - 1, blocked | adj[c], chosen + (c,))

        choose(0, need, 0, ())

    rec(state.t0, state.t1, state.r0, state.r1, state.f0, state.f1, state.active, state.pops)


def _state_key(ctx: SearchContext, state: PartialState) -> bytes:
    """Equivalence key for checkpoint merging (see module docstring)."""
    p0 = ctx.to_words(state.t0)
    p1 = ctx.to_words(state.t1)
    if ctx.cfg.constant_weight:
        kind = steiner(ctx.n // 2)
    else:
        kind = EXTENDED
    return canonical_parts((p0, p1), ctx.n, kind).key


@dataclass
class ClassEntry:
    trade: Trade
    key: CanonicalForm
    volume: int
    raw_count: int
    weighted_count: int


@dataclass
class ClassificationResult:
    n: int
    constant_weight: bool
    checkpoint_depths: tuple[int, ...]
    classes: list[ClassEntry]
    raw_solution_count: int
    weighted_solution_count: int

    def volumes(self) -> list[int]:
        return [c.volume for c in self.classes]


# --- parallel plumbing -------------------------------------------------------

_worker_cfg: SearchConfig | None = None


def _pool_init(cfg: SearchConfig) -> None:
    global _worker_cfg
    _worker_cfg = cfg


def _expand_task(args: tuple[PartialState, int | None]):
    state, budget = args
    ctx = get_context(_worker_cfg)
    states: list[PartialState] = []
    sols: list[tuple[int, int, int]] = []
    _expand(ctx, state, budget, states, sols)
    merged: dict[bytes, tuple[tuple, int]] = {}
    for st in states:
        key = _state_key(ctx, st)
        rep = (st.t0, st.t1, st.r0, st.r1, st.f0, st.f1, st.active, st.pops)
        cur = merged.get(key)
        if cur is None:
            merged[key] = (rep, st.mult)
        else:
            merged[key] = (min(cur[0], rep), cur[1] + st.mult)
    return merged, sols


def _merge_state_dicts(into: dict[bytes, tuple[tuple, int]], other: dict[bytes, tuple[tuple, int]]) -> None:
    for key, (rep, mult) in other.items():
        cur = into.get(key)
        if cur is None:
            into[key] = (rep, mult)
        else:
            into[key] = (min(cur[0], rep), cur[1] + mult)


def _run_layer(cfg: SearchConfig, states: list[PartialState], budget: int | None,
               pool) -> tuple[dict[bytes, tuple[tuple, int]], list[tuple[int, int, int]]]:
    merged: dict[bytes, tuple[tuple, int]] = {}
    solutions: list[tuple[int, int, int]] = []
    tasks = [(st, budget) for st in states]
    if pool is None:
        results = map(_expand_task, tasks)
    else:
        results = pool.imap(_expand_task, tasks, chunksize=1)
    for part_merged, part_sols in results:
        _merge_state_dicts(merged, part_merged)
        solutions.extend(part_sols)
    return merged, solutions


def _states_from_dict(merged: dict[bytes, tuple[tuple, int]]) -> list[PartialState]:
    reps = sorted(merged.values())
    return [PartialState(t0, t1, r0, r1, f0, f1, active, pops, mult)
            for (t0, t1, r0, r1, f0, f1, active, pops), mult in reps]


def classify(cfg: SearchConfig,
             resume: tuple[int, list[PartialState]] | None = None) -> ClassificationResult:
    """Run the full classification for cfg and return nonequivalent classes
    with raw and multiplicity-weighted solution counts."""
    ctx = get_context(cfg)
    global _worker_cfg
    _worker_cfg = cfg

    if resume is None:
        states = [seed_state(cfg)]
        depths_done = 0
    else:
        depths_done, states = resume

    pool = None
    if cfg.workers > 1:
        mp = multiprocessing.get_context("fork")
        pool = mp.Pool(cfg.workers, initializer=_pool_init, initargs=(cfg,))
    try:
        solutions: list[tuple[int, int, int]] = []
        remaining = list(cfg.checkpoint_depths)[depths_done:]
        for li, depth in enumerate(remaining):
            merged, sols = _run_layer(cfg, states, depth, pool)
            solutions.extend(sols)
            states = _states_from_dict(merged)
            if cfg.checkpoint_path:
                save_checkpoint(cfg, depths_done + li + 1, states, cfg.checkpoint_path)
        merged, sols = _run_layer(cfg, states, None, pool)
        if merged:
            raise AssertionError("states survived the final unbounded layer")
        solutions.extend(sols)
        return _classify_solutions(ctx, cfg, solutions, pool)
    finally:
        if pool is not None:
            pool.close()
            pool.join()


def _solution_key(sol: tuple[int, int, int]) -> bytes:
    ctx = get_context(_worker_cfg)
    t0m, t1m, _ = sol
    p0, p1 = ctx.to_words(t0m), ctx.to_words(t1m)
    if ctx.cfg.constant_weight:
        return canonical_parts((p0, p1), ctx.n, steiner(ctx.n // 2)).key
    return canonical_form(Trade(ctx.n, EXTENDED, p0, p1), use_cache=False).key


def _classify_solutions(ctx: SearchContext, cfg: SearchConfig,
                        solutions: list[tuple[int, int, int]],
                        pool=None) -> ClassificationResult:
    # group raw solutions first under the cheap subgroup key (constant-weight
    # mode only), then class representatives under the full ambient group
    prelim: dict[bytes, list[tuple[int, int, int]]] = {}
    if pool is None:
        keys = map(_solution_key, solutions)
    else:
        keys = pool.imap(_solution_key, solutions, chunksize=64)
    for sol, key in zip(solutions, keys):
        prelim.setdefault(key, []).append(sol)
    classes: dict[bytes, ClassEntry] = {}
    for key in sorted(prelim):
        group = prelim[key]
        t0m, t1m, _ = min(group)
        trade = Trade(ctx.n, EXTENDED, ctx.to_words(t0m), ctx.to_words(t1m))
        full = canonical_form(trade, use_cache=False) if cfg.constant_weight else CanonicalForm(key)
        raw = len(group)
        weighted = sum(m for _, _, m in group)
        entry = classes.get(full.key)
        if entry is None:
            classes[full.key] = ClassEntry(trade, full, trade.volume, raw, weighted)
        else:
            entry.raw_count += raw
            entry.weighted_count += weighted
            rep = min((entry.trade.t0, entry.trade.t1), (trade.t0, trade.t1))
            if rep != (entry.trade.t0, entry.trade.t1):
                entry.trade = trade
    ordered = sorted(classes.values(), key=lambda e: (e.volume, e.key.key))
    return ClassificationResult(
        n=cfg.n,
        constant_weight=cfg.constant_weight,
        checkpoint_depths=cfg.checkpoint_depths,
        classes=ordered,
        raw_solution_count=len(solutions),
        weighted_solution_count=sum(m for _, _, m in solutions),
    )


def classify_restricted(cfg: SearchConfig) -> ClassificationResult:
    """classify with every T0 word restricted to cfg.restrict_t0_to."""
    if cfg.restrict_t0_to is None:
        raise ValueError("classify_restricted needs restrict_t0_to")
    return classify(cfg)


def double_count_validate(result: ClassificationResult,
                          cfg: SearchConfig) -> tuple[int, int, bool]:
    """Recount solutions via orbit sizes: each class contributes
    |T0 u T1| * (seed stabilizer order) / |Aut(T0 u T1)| solutions.

    In the general mode the seed stabilizer has (n/2)! 2^(n/2) coordinate
    permutations per vertex choice and Aut is taken in the halved cube; in
    constant-weight mode the matching at the anchor is oriented, giving
    (n/2)! permutations plus as many again through the global complement,
    against the stabilizer in J(n, n/2).
    """
    half = cfg.n // 2
    fact = 1
    for i in range(2, half + 1):
        fact *= i
    expected = 0
    for entry in result.classes:
        union = entry.trade.union()
        if cfg.constant_weight:
            aut = aut_order_set_permonly(union, cfg.n, allow_complement=True)
            num = len(union) * fact * 2
        else:
            aut = automorphisms(entry.trade).order
            num = len(union) * fact * (1 << half)
        if num % aut:
            raise ArithmeticError(
                f"class volume {entry.volume}: {num} not divisible by |Aut|={aut}"
            )
        expected += num // aut
    observed = (result.weighted_solution_count
                if cfg.checkpoint_depths else result.raw_solution_count)
    return expected, observed, expected == observed


def find_third_mate(t: Trade) -> list[tuple[int, ...]]:
    """All word sets T2 disjoint from T0 u T1 such that (T0, T2) and
    (T1, T2) are both valid trades.  For n = 2 mod 4 the complement
    symmetry forces T2 = complement(T0) = T1, so none exist."""
    n = t.n
    if n % 4 == 2:
        return []
    constant = len({w.bit_count() for w in t.union()}) == 1 and t.t0[0].bit_count() == n // 2
    cfg = SearchConfig(n=n, constant_weight=constant and n == 12)
    ctx = get_context(cfg)
    half = n // 2
    adj, comp = ctx.adj, ctx.compl
    t0m = sum(1 << ctx.index[w] for w in t.t0)
    t1m = sum(1 << ctx.index[w] for w in t.t1)
    um = t0m | t1m
    targets = list(_bits(um))
    cand_mask = 0
    for c in range(ctx.size):
        if (um >> c) & 1:
            continue
        if (adj[c] & t0m).bit_count() == half and (adj[c] & t1m).bit_count() == half:
            cand_mask |= 1 << c
    results: list[tuple[int, ...]] = []
    counts = {u: 0 for u in targets}

    def rec(t2: int, avail: int, done: int) -> None:
        # next open target word, preferring the fewest available neighbors
        best_u, best_k = -1, None
        for u in targets:
            if (done >> u) & 1:
                continue
            k = (adj[u] & avail).bit_count()
            if k < half - counts[u]:
                return
            if best_k is None or k < best_k:
                best_u, best_k = u, k
        if best_u < 0:
            results.append(ctx.to_words(t2))
            return
        u = best_u
        need = half - counts[u]
        opts = list(_bits(adj[u] & avail))

        def commit(cur_t2: int, cur_avail: int, picked: tuple[int, ...]) -> None:
            touched = []
            ok = True
            for c in picked:
                for w in _bits(adj[c] & um):
                    counts[w] += 1
                    touched.append(w)
                    if counts[w] > half:
                        ok = False
            if ok:
                # u is closed now; unused candidates adjacent to it are dead
                rec(cur_t2, cur_avail & ~adj[u], done | (1 << u))
            for w in touched:
                counts[w] -= 1

        def choose(idx: int, left: int, cur_t2: int, cur_avail: int, picked: tuple[int, ...]) -> None:
            if left == 0:
                commit(cur_t2, cur_avail, picked)
                return
            for k in range(idx, len(opts) - left + 1):
                c = opts[k]
                b = 1 << c
                if not (cur_avail & b):
                    continue
                cbar = comp[c]
                bb = 1 << cbar
                if not (cur_avail & bb):
                    continue  # the forced complement is blocked
                blocked = adj[c] | adj[cbar] | b | bb
                choose(k + 1, left - 1, cur_t2 | b | bb, cur_avail & ~blocked,
                       picked + (c, cbar))

        choose(0, need, t2, avail, ())

    rec(0, cand_mask, 0)
    return sorted(set(results))


# --- checkpoint persistence --------------------------------------------------


def save_checkpoint(cfg: SearchConfig, depths_done: int,
                    states: Sequence[PartialState], path: str) -> None:
    ctx = get_context(cfg)
    mode = "cw" if cfg.constant_weight else "hc"
    lines = [
        f"checkpoint v1 n={cfg.n} mode={mode} "
        f"depths={','.join(map(str, cfg.checkpoint_depths)) or '-'} done={depths_done}"
    ]
    for st in states:
        trade = Trade(cfg.n, EXTENDED, ctx.to_words(st.t0), ctx.to_words(st.t1))
        lines.append(format_trade(trade).rstrip("\n"))
        lines.append("frontier0: " + " ".join(format_word(ctx.words[i], cfg.n) for i in st.f0))
        lines.append("frontier1: " + " ".join(format_word(ctx.words[i], cfg.n) for i in st.f1))
        lines.append(f"mult: {st.mult} active: {st.active} pops: {st.pops} "
                     f"resolved0: {' '.join(format_word(ctx.words[i], cfg.n) for i in _bits(st.r0))} "
                     f"resolved1: {' '.join(format_word(ctx.words[i], cfg.n) for i in _bits(st.r1))}")
        lines.append("")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)


def load_checkpoint(path: str) -> tuple[SearchConfig, int, list[PartialState]]:
    with open(path) as fh:
        lines = fh.read().splitlines()
    head = lines[0].split()
    if head[:2] != ["checkpoint", "v1"]:
        raise ValueError(f"not a checkpoint file: {path}")
    opts = dict(f.split("=", 1) for f in head[2:])
    n = int(opts["n"])
    cw = opts["mode"] == "cw"
    depths = () if opts["depths"] == "-" else tuple(int(d) for d in opts["depths"].split(","))
    done = int(opts["done"])
    cfg = SearchConfig(n=n, constant_weight=cw, checkpoint_depths=depths)
    ctx = get_context(cfg)

    states = []
    pos = 1
    while pos < len(lines):
        if not lines[pos].strip():
            pos += 1
            continue
        from .trade_core import _parse_header  # header of the embedded record
        _, _, vol, _ = _parse_header(lines[pos])
        pos += 1
        part0 = [parse_word(lines[pos + i], n)[0] for i in range(vol)]
        pos += vol + 1  # skip ---
        part1 = [parse_word(lines[pos + i], n)[0] for i in range(vol)]
        pos += vol

        def wordmask(payload: str) -> int:
            m = 0
            for tok in payload.split():
                m |= 1 << ctx.index[parse_word(tok, n)[0]]
            return m

        def wordtuple(payload: str) -> tuple[int, ...]:
            return tuple(ctx.index[parse_word(tok, n)[0]] for tok in payload.split())

        f0 = wordtuple(lines[pos].split(":", 1)[1])
        f1 = wordtuple(lines[pos + 1].split(":", 1)[1])
        tail = lines[pos + 2]
        pos += 3
        fields: dict[str, str] = {}
        cur = None
        for tok in tail.split():
            if tok.endswith(":"):
                cur = tok[:-1]
                fields[cur] = ""
            else:
                fields[cur] = (fields[cur] + " " + tok).strip()
        t0m = sum(1 << ctx.index[w] for w in part0)
        t1m = sum(1 << ctx.index[w] for w in part1)
        states.append(PartialState(
            t0m, t1m,
            wordmask(fields.get("resolved0", "")),
            wordmask(fields.get("resolved1", "")),
            f0, f1,
            int(fields["active"]), int(fields["pops"]), int(fields["mult"]),
        ))
    return cfg, done, states


# --- result records ----------------------------------------------------------


def format_result(result: ClassificationResult) -> str:
    mode = "cw" if result.constant_weight else "hc"
    depths = ",".join(map(str, result.checkpoint_depths)) or "-"
    out = ["# cubetrades classification v1",
           f"run n={result.n} mode={mode} depths={depths} classes={len(result.classes)} "
           f"raw={result.raw_solution_count} weighted={result.weighted_solution_count}"]
    for e in result.classes:
        out.append(f"class vol={e.volume} raw={e.raw_count} weighted={e.weighted_count} key={e.key.hex}")
        out.append(format_trade(e.trade).rstrip("\n"))
        out.append("")
    return "\n".join(out) + "\n"


def result_digest(result: ClassificationResult) -> str:
    return hashlib.sha256(format_result(result).encode()).hexdigest()

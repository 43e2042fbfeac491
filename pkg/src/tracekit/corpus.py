"""Template-driven synthetic corpus generator.

Every generated program reads input atoms, branches on a comparison, loops
with an accumulator, and calls one helper function; each problem ships
several surface-variant solutions plus inputs chosen to drive different
paths (the first two inputs always straddle the main branch condition).
Generation is deterministic in the seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .minic import ExecInput, SourceProgram, execute, parse
from .rng import Mulberry32, derive_seed

VAR_NAMES = ["a", "b", "c", "n", "m", "t", "u", "v", "w", "x", "y", "z",
             "acc", "cnt", "idx", "lim", "num", "res", "sum", "tmp", "val"]
HELPER_NAMES = ["adjust", "apply", "calc", "combine", "scale", "score", "shift", "step"]


@dataclass
class CorpusProblem:
    problem_id: str
    programs: list[SourceProgram]
    inputs: list[ExecInput]


class _Rng:
    def __init__(self, seed: int):
        self.rng = Mulberry32(seed)

    def randint(self, lo: int, hi: int) -> int:
        return lo + self.rng.next_below(hi - lo + 1)

    def choice(self, seq):
        return seq[self.rng.next_below(len(seq))]

    def sample_names(self, pool, k):
        picked = []
        candidates = list(pool)
        for _ in range(k):
            name = candidates.pop(self.rng.next_below(len(candidates)))
            picked.append(name)
        return picked


def _loop_text(rng: _Rng, var: str, bound: int, body: str, indent: str) -> list[str]:
    if rng.randint(0, 1) == 0:
        return [
            f"{indent}for ({var} = 0; {var} < {bound}; {var} = {var} + 1) {{",
            f"{indent}    {body}",
            f"{indent}}}",
        ]
    return [
        f"{indent}{var} = 0;",
        f"{indent}while ({var} < {bound}) {{",
        f"{indent}    {body}",
        f"{indent}    {var} = {var} + 1;",
        f"{indent}}}",
    ]


def _archetype_scale(rng: _Rng, params: dict) -> str:
    a, r, i = rng.sample_names(VAR_NAMES, 3)
    helper = rng.choice(HELPER_NAMES)
    m, add, thr = params["m"], params["add"], params["thr"]
    step, bound = params["step"], params["bound"]
    lines = [
        f"int {helper}(int p) {{",
        f"    return p * {m} + {add};",
        "}",
        "",
        "int main() {",
        f"    int {a};",
        f"    int {r};",
        f"    int {i};",
        f"    {a} = read_int();",
        f"    {r} = {helper}({a});",
        f"    if ({a} > {thr}) {{",
        f"        {r} = {r} - {step};",
        "    } else {",
        f"        {r} = {r} + {step};",
        "    }",
    ]
    lines += _loop_text(rng, i, bound, f"{r} = {r} + {step};", "    ")
    lines += [f"    print({r});", "    return 0;", "}"]
    return "\n".join(lines) + "\n"


def _archetype_larger(rng: _Rng, params: dict) -> str:
    a, b, m, i = rng.sample_names(VAR_NAMES, 4)
    helper = rng.choice(HELPER_NAMES)
    dec, bound = params["dec"], params["bound"]
    lines = [
        f"int {helper}(int p, int q) {{",
        "    if (p > q) {",
        "        return p;",
        "    }",
        "    return q;",
        "}",
        "",
        "int main() {",
        f"    int {a};",
        f"    int {b};",
        f"    int {m};",
        f"    int {i};",
        f"    {a} = read_int();",
        f"    {b} = read_int();",
        f"    {m} = {helper}({a}, {b});",
    ]
    lines += _loop_text(rng, i, bound, f"{m} = {m} - {dec};", "    ")
    lines += [
        f"    if ({m} < 0) {{",
        f"        {m} = 0 - {m};",
        "    }",
        f"    print({m});",
        "    return 0;",
        "}",
    ]
    return "\n".join(lines) + "\n"


def _archetype_sumloop(rng: _Rng, params: dict) -> str:
    n, s, i = rng.sample_names(VAR_NAMES, 3)
    helper = rng.choice(HELPER_NAMES)
    w, thr, add = params["w"], params["thr"], params["add"]
    lines = [
        f"int {helper}(int p) {{",
        f"    return p + {add};",
        "}",
        "",
        "int main() {",
        f"    int {n};",
        f"    int {s};",
        f"    int {i};",
        f"    {n} = read_int();",
        f"    {s} = 0;",
        f"    for ({i} = 1; {i} <= {n}; {i} = {i} + 1) {{",
        f"        {s} = {s} + {i} * {w};",
        "    }",
        f"    if ({n} >= {thr}) {{",
        f"        {s} = {helper}({s});",
        "    } else {",
        f"        {s} = {s} - 1;",
        "    }",
        f"    print({s});",
        "    return 0;",
        "}",
    ]
    return "\n".join(lines) + "\n"


def _archetype_floatgate(rng: _Rng, params: dict) -> str:
    f, g, i = rng.sample_names(VAR_NAMES, 3)
    helper = rng.choice(HELPER_NAMES)
    thr, bound = params["thr"], params["bound"]
    lines = [
        f"double {helper}(double p) {{",
        "    return p * 2.0;",
        "}",
        "",
        "int main() {",
        f"    double {f};",
        f"    double {g};",
        f"    int {i};",
        f"    {f} = read_float();",
        f"    {g} = {helper}({f});",
        f"    if ({f} < {thr}.0) {{",
        f"        {g} = {g} + 1.5;",
        "    } else {",
        f"        {g} = {g} - 0.5;",
        "    }",
    ]
    lines += _loop_text(rng, i, bound, f"{g} = {g} + 0.25;", "    ")
    lines += [f"    print({g});", "    return 0;", "}"]
    return "\n".join(lines) + "\n"


def _archetype_array(rng: _Rng, params: dict) -> str:
    t, i = rng.sample_names(VAR_NAMES, 2)
    arr = "buf" if t != "buf" and i != "buf" else "data"
    helper = rng.choice(HELPER_NAMES)
    size, mul, thr = params["size"], params["mul"], params["thr"]
    lines = [
        f"int {helper}(int p) {{",
        f"    return p * {mul};",
        "}",
        "",
        "int main() {",
        f"    int {arr}[{size}];",
        f"    int {i};",
        f"    int {t};",
        f"    {t} = read_int();",
        f"    for ({i} = 0; {i} < {size}; {i} = {i} + 1) {{",
        f"        {arr}[{i}] = {helper}({i}) + {t};",
        "    }",
        f"    if ({t} > {thr}) {{",
        f"        {t} = {t} + 1;",
        "    } else {",
        f"        {t} = {t} - 1;",
        "    }",
        f"    print({arr}[0] + {t});",
        "    return 0;",
        "}",
    ]
    return "\n".join(lines) + "\n"


# branch thresholds snap to a small shared pool so heldout problems reuse
# tokens seen during training
THRESHOLD_POOL = list(range(10, 96, 5))


def _pooled_threshold(rng: _Rng) -> int:
    return rng.choice(THRESHOLD_POOL)


def _plan_scale(rng: _Rng) -> tuple[dict, list[str]]:
    thr = _pooled_threshold(rng)
    params = {
        "m": rng.randint(2, 5), "add": rng.randint(0, 9), "thr": thr,
        "step": rng.randint(1, 9), "bound": rng.randint(2, 6),
    }
    inputs = [str(thr + rng.randint(1, 5)), str(thr - rng.randint(0, 5))]
    for _ in range(rng.randint(1, 3)):
        inputs.append(str(max(0, thr + rng.randint(-9, 9))))
    return params, inputs


def _plan_larger(rng: _Rng) -> tuple[dict, list[str]]:
    params = {"dec": rng.randint(1, 9), "bound": rng.randint(2, 6)}
    a = rng.randint(10, 90)
    b = rng.randint(10, 90)
    if a == b:
        b += 1
    inputs = [f"{max(a, b)} {min(a, b)}", f"{min(a, b)} {max(a, b)}"]
    for _ in range(rng.randint(1, 3)):
        inputs.append(f"{rng.randint(0, 99)} {rng.randint(0, 99)}")
    return params, inputs


def _plan_sumloop(rng: _Rng) -> tuple[dict, list[str]]:
    thr = rng.randint(2, 8)
    params = {"w": rng.randint(1, 5), "thr": thr, "add": rng.randint(1, 9)}
    inputs = [str(thr + rng.randint(0, 3)), str(max(1, thr - rng.randint(1, 3)))]
    for _ in range(rng.randint(1, 3)):
        inputs.append(str(rng.randint(1, 9)))
    return params, inputs


def _plan_floatgate(rng: _Rng) -> tuple[dict, list[str]]:
    thr = _pooled_threshold(rng)
    params = {"thr": thr, "bound": rng.randint(2, 6)}
    inputs = [f"{thr - rng.randint(1, 9)}.5", f"{thr + rng.randint(0, 9)}.5"]
    for _ in range(rng.randint(1, 3)):
        inputs.append(f"{max(0, thr + rng.randint(-9, 9))}.5")
    return params, inputs


def _plan_array(rng: _Rng) -> tuple[dict, list[str]]:
    thr = _pooled_threshold(rng)
    params = {"size": rng.randint(3, 6), "mul": rng.randint(2, 4), "thr": thr}
    inputs = [str(thr + rng.randint(1, 5)), str(thr - rng.randint(0, 5))]
    for _ in range(rng.randint(1, 3)):
        inputs.append(str(max(0, thr + rng.randint(-9, 9))))
    return params, inputs


_ARCHETYPES = [
    (_plan_scale, _archetype_scale),
    (_plan_larger, _archetype_larger),
    (_plan_sumloop, _archetype_sumloop),
    (_plan_floatgate, _archetype_floatgate),
    (_plan_array, _archetype_array),
]


def gen_corpus(seed: int, n_problems: int, variants_per_problem: int = 3) -> list[CorpusProblem]:
    """Generate problems with variant solutions and 2-5 inputs each; every
    (program, input) pair is verified to parse and execute cleanly."""
    if n_problems < 2:
        raise ValueError("need at least 2 problems")
    problems = []
    for p in range(n_problems):
        plan_rng = _Rng(derive_seed(seed, "plan", p))
        plan, render = _ARCHETYPES[p % len(_ARCHETYPES)]
        params, input_texts = plan(plan_rng)
        problem_id = f"p{p:03d}"
        programs = []
        for v in range(variants_per_problem):
            surface_rng = _Rng(derive_seed(seed, "surface", p, v))
            text = render(surface_rng, params)
            programs.append(SourceProgram(text, problem_id))
        inputs = [ExecInput.from_text(t) for t in input_texts]
        for prog in programs:
            parsed = parse(prog.text)
            for inp in inputs:
                trace = execute(parsed, inp)
                if not trace.ok:
                    raise AssertionError(
                        f"generator bug: {problem_id} fails with {trace.error}: {trace.error_message}"
                    )
        problems.append(CorpusProblem(problem_id, programs, inputs))
    return problems


def write_corpus(problems: list[CorpusProblem], path) -> None:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    manifest = []
    for problem in problems:
        pdir = root / problem.problem_id
        pdir.mkdir(exist_ok=True)
        prog_files = []
        for i, prog in enumerate(problem.programs):
            name = f"v{i}.mc"
            (pdir / name).write_text(prog.text, encoding="utf-8")
            prog_files.append(name)
        input_files = []
        for i, inp in enumerate(problem.inputs):
            name = f"in{i}.in"
            (pdir / name).write_text(" ".join(inp.tokens) + "\n", encoding="utf-8")
            input_files.append(name)
        manifest.append({
            "problem_id": problem.problem_id,
            "programs": prog_files,
            "inputs": input_files,
        })
    (root / "corpus.json").write_text(
        json.dumps({"problems": manifest}, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_corpus(path) -> list[CorpusProblem]:
    root = Path(path)
    data = json.loads((root / "corpus.json").read_text(encoding="utf-8"))
    problems = []
    for entry in data["problems"]:
        pdir = root / entry["problem_id"]
        programs = [
            SourceProgram((pdir / f).read_text(encoding="utf-8"), entry["problem_id"])
            for f in entry["programs"]
        ]
        inputs = [
            ExecInput.from_text((pdir / f).read_text(encoding="utf-8"))
            for f in entry["inputs"]
        ]
        problems.append(CorpusProblem(entry["problem_id"], programs, inputs))
    return problems

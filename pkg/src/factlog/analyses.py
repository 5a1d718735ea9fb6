"""Bundled analysis presets and corpus-level runners.

A preset couples fact specs, a Datalog program, and a language.  On disk a
preset is a directory with a ``preset.cfg`` next to its ``.spec`` and ``.dl``
files:

    [preset]
    language = go
    specs = functions.spec
    program = program.dl
    primary_output = calls
    fact_relations = edge
    graph_relation = edge

``fact_relations`` lists the relations counted as generated facts in run
statistics; ``graph_relation`` (optional) names the edge relation for graph
export.  The bundled directory can be overridden with the FACTLOG_PRESET_DIR
environment variable or an explicit ``base`` argument.
"""

from __future__ import annotations

import configparser
import os
import time
from dataclasses import dataclass, field
from multiprocessing import get_context
from pathlib import Path

from .datalog import DatalogProgram, evaluate, parse_program
from .errors import FactlogError, SpecFormatError
from .facts import Database
from .languages import LanguageDefinition, classify, get_language
from .rewrite import FactSpec, facts_for_smap, load_fact_spec

PRESET_DIR_ENV = "FACTLOG_PRESET_DIR"

EXTENSIONS: dict[str, tuple[str, ...]] = {
    "go": (".go",),
    "c": (".c", ".h"),
    "zig": (".zig",),
    "arith": (".arith",),
}


@dataclass(frozen=True)
class AnalysisPreset:
    name: str
    language: str
    fact_specs: tuple[FactSpec, ...]
    program_text: str
    primary_output: str
    fact_relations: tuple[str, ...]
    graph_relation: str | None = None

    def program(self) -> DatalogProgram:
        return parse_program(self.program_text)

    def language_def(self) -> LanguageDefinition:
        return get_language(self.language)


@dataclass
class RunStats:
    """Corpus-level counters for one fact-generation run.

    fact_count sums each file's unique facts over the preset's fact
    relations, so a call edge appearing in two files counts twice;
    function_count is the total number of outer-template matches.
    """

    files: int = 0
    line_count: int = 0
    fact_count: int = 0
    function_count: int = 0
    spec_matches: dict[str, int] = field(default_factory=dict)
    elapsed_s: float = 0.0

    @property
    def kloc(self) -> float:
        return self.line_count / 1000.0

    @property
    def facts_per_function(self) -> float | None:
        if self.function_count == 0:
            return None
        return self.fact_count / self.function_count

    def as_dict(self) -> dict:
        return {
            "files": self.files,
            "line_count": self.line_count,
            "kloc": self.kloc,
            "fact_count": self.fact_count,
            "function_count": self.function_count,
            "spec_matches": dict(sorted(self.spec_matches.items())),
            "elapsed_s": self.elapsed_s,
            "facts_per_function": self.facts_per_function,
        }


# ---------------------------------------------------------------------------
# Preset loading


def preset_dir(base: str | Path | None = None) -> Path:
    if base is not None:
        return Path(base)
    env = os.environ.get(PRESET_DIR_ENV)
    if env:
        return Path(env)
    return Path(__file__).parent / "presets"


def list_presets(base: str | Path | None = None) -> list[str]:
    root = preset_dir(base)
    if not root.is_dir():
        return []
    return sorted(p.name for p in root.iterdir() if (p / "preset.cfg").is_file())


def load_preset(name: str, base: str | Path | None = None) -> AnalysisPreset:
    root = preset_dir(base) / name
    cfg_path = root / "preset.cfg"
    if not cfg_path.is_file():
        known = ", ".join(list_presets(base)) or "none found"
        raise FactlogError(f"unknown preset {name!r} (available: {known})")
    cfg = configparser.ConfigParser()
    cfg.read(cfg_path, encoding="utf-8")
    if not cfg.has_section("preset"):
        raise SpecFormatError(f"{cfg_path}: missing [preset] section")
    section = cfg["preset"]
    try:
        language = section["language"].strip()
        spec_names = section["specs"].split()
    except KeyError as exc:
        raise SpecFormatError(f"{cfg_path}: missing key {exc}") from None
    program_file = section.get("program", "").strip()
    primary_output = section.get("primary_output", "").strip()
    fact_relations = tuple(section.get("fact_relations", "").split())
    graph_relation = section.get("graph_relation", "").strip() or None
    specs = tuple(load_fact_spec(root / s, language=language) for s in spec_names)
    program_text = ""
    if program_file:
        program_text = (root / program_file).read_text(encoding="utf-8")
        parse_program(program_text)  # fail fast on a broken bundled program
    return AnalysisPreset(
        name=name,
        language=language,
        fact_specs=specs,
        program_text=program_text,
        primary_output=primary_output,
        fact_relations=fact_relations,
        graph_relation=graph_relation,
    )


# ---------------------------------------------------------------------------
# File discovery


def discover_files(inputs: list[str | Path], language: str) -> list[Path]:
    """Expand directories to language source files; keep explicit files as-is."""
    exts = EXTENSIONS.get(language, ())
    out: set[Path] = set()
    for item in inputs:
        p = Path(item)
        if p.is_dir():
            for ext in exts:
                out.update(q for q in p.rglob(f"*{ext}") if q.is_file())
        elif p.is_file():
            out.add(p)
        else:
            raise FactlogError(f"no such file or directory: {p}")
    return sorted(out)


# ---------------------------------------------------------------------------
# Corpus runners


def _process_file(
    task: tuple[str, tuple[FactSpec, ...], LanguageDefinition]
) -> tuple[str, Database, dict[str, int], list[str], int]:
    path, specs, lang = task
    try:
        source = Path(path).read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        return path, Database(), {}, [f"{path}: {exc}"], 0
    smap = classify(source, lang)
    db = Database()
    matches: dict[str, int] = {}
    diagnostics = [f"{path}: {w}" for w in smap.warnings]
    for spec in specs:
        result = facts_for_smap(spec, smap, path)
        db.merge(result.facts)
        matches[spec.name] = matches.get(spec.name, 0) + result.match_count
        diagnostics.extend(result.diagnostics)
    return path, db, matches, diagnostics, smap.line_count()


def run_fact_generation(
    preset: AnalysisPreset, paths: list[str | Path], jobs: int = 1
) -> tuple[Database, RunStats, list[str]]:
    """Generate facts for a corpus; returns (facts, stats, diagnostics).

    Results are merged in sorted path order, so output is independent of
    worker scheduling and of the jobs value.
    """
    started = time.monotonic()
    lang = preset.language_def()
    tasks = [(str(p), preset.fact_specs, lang) for p in sorted(Path(p) for p in paths)]
    if jobs > 1 and len(tasks) > 1:
        chunk = max(1, len(tasks) // (jobs * 4))
        with get_context("fork").Pool(jobs) as pool:
            results = pool.map(_process_file, tasks, chunksize=chunk)
    else:
        results = [_process_file(t) for t in tasks]

    db = Database()
    stats = RunStats(files=len(results))
    diagnostics: list[str] = []
    for _, file_db, matches, diags, lines in results:
        db.merge(file_db)
        stats.line_count += lines
        counted = preset.fact_relations or tuple(file_db.relations)
        stats.fact_count += sum(len(file_db.relations.get(rel, ())) for rel in counted)
        for name, n in matches.items():
            stats.spec_matches[name] = stats.spec_matches.get(name, 0) + n
        diagnostics.extend(diags)
    stats.function_count = sum(stats.spec_matches.values())
    stats.elapsed_s = time.monotonic() - started
    return db, stats, diagnostics


def run_analysis(
    preset: AnalysisPreset, paths: list[str | Path], jobs: int = 1
) -> tuple[Database, RunStats, list[str]]:
    """Fact generation followed by Datalog evaluation; the returned Database
    holds both the generated facts and the computed relations."""
    started = time.monotonic()
    facts, stats, diagnostics = run_fact_generation(preset, paths, jobs=jobs)
    solved = evaluate(preset.program(), facts)
    stats.elapsed_s = time.monotonic() - started
    return solved, stats, diagnostics

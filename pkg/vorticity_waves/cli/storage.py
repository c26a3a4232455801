"""
JSON and CSV persistence of Solutions, Branches, profiles and field grids
"""
import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from vorticity_waves.critlayer.contour import Contour
from vorticity_waves.critlayer.stream import FieldGrid, StreamEvaluator
from vorticity_waves.errors import ConfigError, WaveSolverError
from vorticity_waves.geometry.profile import assess_solution, solution_curve
from vorticity_waves.model.parameters import constants_of
from vorticity_waves.model.solution import Solution
from vorticity_waves.models.schemas import (
    AnyParams,
    BranchRecord,
    EventRecord,
    GeneralParams,
    Params,
    ParamsRecord,
    SolutionRecord,
    SolverOptions,
    WaveClass,
)
from vorticity_waves.solver.branch import Branch, BranchEvent
from vorticity_waves.spectral.trace import HoloTrace

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def params_record(params: AnyParams) -> ParamsRecord:
    const = constants_of(params)
    d = None if math.isinf(const.depth) else const.depth
    if isinstance(params, Params):
        return ParamsRecord(G=params.G, a=params.a, l=params.l, omega=const.omega, B=const.bernoulli, d=d)
    return ParamsRecord(G=params.G, omega=const.omega, B=const.bernoulli, d=d)


def params_from_record(record: ParamsRecord) -> AnyParams:
    if record.a is not None:
        return Params(G=record.G, a=record.a, l=record.l or 0.0)
    return GeneralParams(omega=record.omega, bernoulli=record.B, G=record.G, d=record.d)


def solution_record(s: Solution, config: Optional[Dict[str, Any]] = None) -> SolutionRecord:
    return SolutionRecord(
        config=config,
        params=params_record(s.params),
        n=s.N,
        coeffs=[float(c) for c in s.trace.coeffs],
        residual_norm=s.residual_norm,
        wave_class=s.wave_class,
        diagnostics={key: _finite_or_none(value) for key, value in s.diagnostics.items()},
    )


def solution_from_record(record: SolutionRecord, recompute: bool = False,
                         options: Optional[SolverOptions] = None) -> Solution:
    """
    Rebuild a Solution; with ``recompute`` the residual and geometry are evaluated afresh
    """
    trace = HoloTrace(np.array(record.coeffs, dtype=float))
    params = params_from_record(record.params)
    stored = {key: (math.inf if value is None else value) for key, value in record.diagnostics.items()}
    if recompute:
        solution = assess_solution(trace, params, options)
        solution.diagnostics = {**stored, **solution.diagnostics}
        return solution
    return Solution(
        trace=trace,
        params=params,
        residual_norm=record.residual_norm,
        wave_class=WaveClass(record.wave_class),
        diagnostics=stored,
    )


def _write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def _read_json(path: PathLike) -> Dict[str, Any]:
    path = Path(path)
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"Input file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Input file {path} is not valid JSON: {e}") from e


def _sanitize(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _sanitize(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(item) for item in value]
    if isinstance(value, (float, np.floating)):
        return _finite_or_none(float(value))
    if isinstance(value, np.integer):
        return int(value)
    return value


def write_json(payload: Dict[str, Any], path: PathLike) -> Path:
    """Write a JSON document; non-finite numbers become null"""
    return _write_text(path, json.dumps(_sanitize(payload), indent=2, allow_nan=False) + "\n")


def save_solution(s: Solution, path: PathLike, config: Optional[Dict[str, Any]] = None) -> Path:
    record = solution_record(s, config)
    return _write_text(path, record.model_dump_json(by_alias=True, indent=2) + "\n")


def load_solution(path: PathLike, recompute: bool = True, options: Optional[SolverOptions] = None) -> Solution:
    try:
        record = SolutionRecord.model_validate(_read_json(path))
    except ValueError as e:
        raise ConfigError(f"{path} is not a Solution file: {e}") from e
    return solution_from_record(record, recompute, options)


def branch_record(branch: Branch, config: Optional[Dict[str, Any]] = None) -> BranchRecord:
    path = {key: (None if isinstance(value, float) and math.isinf(value) else value)
            for key, value in branch.path.items()}
    return BranchRecord(
        config=config,
        path=path,
        n=branch.N,
        points=[solution_record(point) for point in branch.points],
        events=[
            EventRecord(kind=event.kind, value=event.value, solution=solution_record(event.solution))
            for event in branch.events
        ],
        summary={**branch.summary, "status": branch.status},
    )


def save_branch(branch: Branch, path: PathLike, config: Optional[Dict[str, Any]] = None) -> Path:
    record = branch_record(branch, config)
    return _write_text(path, record.model_dump_json(by_alias=True, indent=2) + "\n")


def load_branch(path: PathLike) -> Branch:
    try:
        record = BranchRecord.model_validate(_read_json(path))
    except ValueError as e:
        raise ConfigError(f"{path} is not a Branch file: {e}") from e
    if not record.points:
        raise ConfigError(f"Branch file {path} holds no points")
    return Branch(
        points=[solution_from_record(point) for point in record.points],
        path=dict(record.path),
        events=[
            BranchEvent(kind=event.kind, value=event.value, solution=solution_from_record(event.solution))
            for event in record.events
        ],
        summary=dict(record.summary),
        status=str(record.summary.get("status", "complete")),
    )


def _write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    logger.info(f"Wrote {path}")
    return path


def read_csv(path: PathLike) -> List[Dict[str, str]]:
    with Path(path).open("r", newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def write_profile_csv(s: Solution, path: PathLike) -> Path:
    """One period of the physical profile: alpha, x, y, x_alpha"""
    curve = solution_curve(s)
    rows = zip(curve.alphas, curve.xs, curve.ys, curve.x_slopes)
    return _write_csv(path, ("alpha", "x", "y", "x_alpha"), rows)


def write_field_csv(grid: FieldGrid, path: PathLike) -> Path:
    return _write_csv(path, ("alpha", "beta", "F"), grid.rows())


def write_contour_csv(contour: Contour, e: StreamEvaluator, path: PathLike) -> Path:
    """Traced zero contour in conformal (alpha, beta) and physical (x, y) coordinates"""
    rows = []
    for alpha, beta in zip(contour.alphas[contour.found], contour.betas[contour.found]):
        x, y = e.physical_point(np.array([alpha]), float(beta))
        rows.append((float(alpha), float(beta), float(x[0]), float(y[0])))
    return _write_csv(path, ("alpha", "beta", "x", "y"), rows)


def write_summary_csv(branch: Branch, path: PathLike) -> Path:
    """Per-point summary table of a branch"""
    rows = []
    for index, point in enumerate(branch.points):
        rows.append((
            index,
            float(point.a),
            point.amplitude,
            float(point.residual_norm),
            point.wave_class.value,
            float(point.diagnostics.get("min_x_slope", math.nan)),
            float(point.diagnostics.get("self_gap", math.nan)),
            int(point.diagnostics.get("iterations", 0)),
            point.N,
        ))
    header = ("index", "a", "b1", "residual_norm", "class", "min_x_slope", "self_gap", "iterations", "n")
    return _write_csv(path, header, rows)


def write_error(e: WaveSolverError, out_dir: PathLike) -> Path:
    return write_json(e.to_dict(), Path(out_dir) / "error.json")

"""
Solve tracking for continuation summaries
"""
import logging
from collections import defaultdict
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)


class SolveTracker:
    """
    Records Newton solves along a run and aggregates per-stage statistics
    """

    def __init__(self, run_id: str = "run"):
        self.run_id = run_id
        self.history: List[Dict[str, Any]] = []
        self.stage_statistics: Dict[str, Dict[str, Any]] = defaultdict(lambda: {
            "total_solves": 0,
            "successful_solves": 0,
            "failed_solves": 0,
            "total_iterations": 0,
            "avg_duration": 0.0,
            "last_used": None,
        })

    def record_solve(
        self,
        stage: str,
        parameter: float,
        iterations: int,
        success: bool,
        duration: float,
        residual_norm: Optional[float] = None,
        error: Optional[str] = None,
    ):
        """
        Record one corrector solve

        Args:
            stage: Which driver issued the solve (predictor, arclength, event, ...)
            parameter: Family parameter a of the solve
            iterations: Newton iterations used
            success: Whether the solve converged and was accepted
            duration: Wall time in seconds
            residual_norm: Final residual sup-norm, when known
            error: Fault reason when the solve failed
        """
        self.history.append({
            "timestamp": datetime.now(timezone.utc).isoformat(),
            "stage": stage,
            "a": parameter,
            "iterations": iterations,
            "success": success,
            "duration": duration,
            "residual_norm": residual_norm,
            "error": error,
        })

        stats = self.stage_statistics[stage]
        stats["total_solves"] += 1
        if success:
            stats["successful_solves"] += 1
        else:
            stats["failed_solves"] += 1
        stats["total_iterations"] += iterations

        prev_avg = stats["avg_duration"]
        total = stats["total_solves"]
        stats["avg_duration"] = (prev_avg * (total - 1) + duration) / total
        stats["last_used"] = datetime.now(timezone.utc).isoformat()

    def get_statistics(self, stage: Optional[str] = None) -> Dict[str, Any]:
        if stage:
            return dict(self.stage_statistics.get(stage, {}))
        return {name: dict(stats) for name, stats in self.stage_statistics.items()}

    def get_history(self, stage: Optional[str] = None, limit: int = 10) -> List[Dict[str, Any]]:
        if stage:
            history = [record for record in self.history if record["stage"] == stage]
        else:
            history = self.history
        return history[-limit:]

    def failure_reasons(self) -> List[Tuple[str, int]]:
        """Fault reasons ordered by frequency"""
        counts: Dict[str, int] = defaultdict(int)
        for record in self.history:
            if record["error"]:
                counts[record["error"]] += 1
        return sorted(counts.items(), key=lambda item: item[1], reverse=True)

    def summary(self) -> Dict[str, Any]:
        return {
            "run_id": self.run_id,
            "solves": len(self.history),
            "stages": self.get_statistics(),
            "failure_reasons": dict(self.failure_reasons()),
        }

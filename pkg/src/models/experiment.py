"""Experiment configuration and run record models."""
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Dict, List, Optional, Tuple

from .grid import BoxGrid, FracOrder
from .kernel import KernelMethod
from .model_spec import ModelSpec, Nonlinearity, Potential, PotentialFamily
from .solve import SeedKind, SeedSpec, SolveConfig

MODEL_KEYS = ('dim', 's', 'm', 'a', 'p', 'potential', 'v0', 'beta', 't0')
GRID_KEYS = ('half_width', 'points')
SOLVER_KEYS = ('max_iters', 'tol', 'damping', 'stabilization', 'seed', 'seed_level',
               'seed_radius', 'seed_amplitude', 'seed_width', 'seed_file',
               'lambda_count', 'path_vertices', 'support_tol')
EXPERIMENT_KEYS = ('name', 'radii', 'fit_window', 'kernel_r_max', 'kernel_method',
                   'pv_cutoff', 'noncrit_steps', 'pad')

SECTION_KEYS = {
    'model': MODEL_KEYS,
    'grid': GRID_KEYS,
    'solver': SOLVER_KEYS,
    'experiment': EXPERIMENT_KEYS,
}


class ExperimentName(Enum):
    """Experiment selector."""
    EXISTENCE = "existence"
    EXISTENCE2 = "existence2"
    NONCRIT = "noncrit"
    KERNEL = "kernel"


def _floats(text: str) -> List[float]:
    return [float(item) for item in text.replace(';', ',').split(',') if item.strip()]


def _flag(text: str) -> bool:
    return text.strip().lower() in ('1', 'true', 'yes', 'on')


@dataclass
class ExperimentConfig:
    """Validated experiment file contents."""
    model: ModelSpec
    grid: BoxGrid
    solver: SolveConfig
    name: ExperimentName = ExperimentName.EXISTENCE
    radii: List[float] = field(default_factory=lambda: [2.0, 4.0, 6.0])
    fit_window: Tuple[float, float] = (3.0, 7.0)
    kernel_r_max: float = 40.0
    kernel_method: Optional[KernelMethod] = None
    pv_cutoff: Optional[float] = None
    noncrit_steps: int = 40
    pad: int = 1

    @classmethod
    def from_sections(cls, sections: Dict[str, Dict[str, str]]) -> 'ExperimentConfig':
        """Build from parsed `[section] key = value` text; missing keys take defaults."""
        model = sections.get('model', {})
        grid = sections.get('grid', {})
        solver = sections.get('solver', {})
        experiment = sections.get('experiment', {})

        cap = model.get('t0')
        nonlinearity = Nonlinearity(
            m=float(model.get('m', 1.0)),
            a=float(model.get('a', 1.0)),
            p=float(model.get('p', 3.0)),
            truncation_cap=float(cap) if cap not in (None, '', 'none') else None
        )
        potential = Potential(
            family=PotentialFamily(model.get('potential', 'inverse_power')),
            amplitude=float(model.get('v0', 0.5)),
            beta=float(model.get('beta', 1.0))
        )
        spec = ModelSpec(
            dim=int(model.get('dim', 2)),
            order=FracOrder(float(model.get('s', 0.6))),
            nonlinearity=nonlinearity,
            potential=potential
        )
        box = BoxGrid(spec.dim, float(grid.get('half_width', 16.0)), int(grid.get('points', 256)))

        seed_level = solver.get('seed_level')
        seed_radius = solver.get('seed_radius')
        seed = SeedSpec(
            kind=SeedKind(solver.get('seed', 'plateau')),
            level=float(seed_level) if seed_level else None,
            radius=float(seed_radius) if seed_radius else None,
            amplitude=float(solver.get('seed_amplitude', 2.0)),
            width=float(solver.get('seed_width', 1.0)),
            path=solver.get('seed_file')
        )
        solve = SolveConfig(
            max_iters=int(solver.get('max_iters', 4000)),
            tol=float(solver.get('tol', 1e-8)),
            damping=float(solver.get('damping', 0.8)),
            stabilization=_flag(solver.get('stabilization', 'true')),
            seed=seed,
            lambda_count=int(solver.get('lambda_count', 8)),
            path_vertices=int(solver.get('path_vertices', 16)),
            support_tol=float(solver.get('support_tol', 1e-4))
        )

        method = experiment.get('kernel_method')
        cutoff = experiment.get('pv_cutoff')
        window = _floats(experiment.get('fit_window', '3, 7'))
        return cls(
            model=spec,
            grid=box,
            solver=solve,
            name=ExperimentName(experiment.get('name', 'existence')),
            radii=_floats(experiment.get('radii', '2, 4, 6')),
            fit_window=(window[0], window[1]),
            kernel_r_max=float(experiment.get('kernel_r_max', 40.0)),
            kernel_method=KernelMethod(method) if method else None,
            pv_cutoff=float(cutoff) if cutoff else None,
            noncrit_steps=int(experiment.get('noncrit_steps', 40)),
            pad=int(experiment.get('pad', 1))
        )

    def to_dict(self) -> dict:
        """Canonical echo used for hashing and the run summary."""
        return {
            'model': self.model.to_dict(),
            'grid': self.grid.to_dict(),
            'solver': self.solver.to_dict(),
            'experiment': {
                'name': self.name.value,
                'radii': list(self.radii),
                'fit_window': list(self.fit_window),
                'kernel_r_max': self.kernel_r_max,
                'kernel_method': self.kernel_method.value if self.kernel_method else None,
                'pv_cutoff': self.pv_cutoff,
                'noncrit_steps': self.noncrit_steps,
                'pad': self.pad,
            },
        }


@dataclass
class RunRecord:
    """Persisted outcome of one CLI run."""
    command: str
    config: dict
    config_hash: str
    started_at: Optional[datetime] = None
    finished_at: Optional[datetime] = None
    outputs: Dict[str, str] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    summary_hash: str = ""
    passed: bool = True
    run_dir: Optional[str] = None

    def to_dict(self) -> dict:
        """Convert to dictionary."""
        return {
            'command': self.command,
            'config': self.config,
            'config_hash': self.config_hash,
            'started_at': self.started_at.isoformat() if self.started_at else None,
            'finished_at': self.finished_at.isoformat() if self.finished_at else None,
            'outputs': self.outputs,
            'summary': self.summary,
            'summary_hash': self.summary_hash,
            'passed': self.passed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'RunRecord':
        """Create RunRecord from dictionary."""
        started = data.get('started_at')
        finished = data.get('finished_at')
        return cls(
            command=data['command'],
            config=data['config'],
            config_hash=data['config_hash'],
            started_at=datetime.fromisoformat(started) if started else None,
            finished_at=datetime.fromisoformat(finished) if finished else None,
            outputs=data.get('outputs', {}),
            summary=data.get('summary', {}),
            summary_hash=data.get('summary_hash', ''),
            passed=data.get('passed', True)
        )

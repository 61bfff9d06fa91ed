"""Ground-truth AUV plant driven by the full wave field."""

import numpy as np

from wavetrack.dynamics.auv import AuvParams, truth_field
from wavetrack.dynamics.wave import WaveParams
from wavetrack.sim.disturbance import sample_disturbance
from wavetrack.sim.integrate import integrate_step


class AuvPlant:
    """RK4 plant whose disturbance is the seeded d_nom sequence.

    The plant always uses the spatially varying wave, whichever model the
    value function was computed for.
    """

    def __init__(
        self,
        auv: AuvParams,
        wave: WaveParams,
        s0,
        seed: int = 0,
        disturbance_bound: float = 0.001,
        hold: float | None = None,
    ):
        self.field = truth_field(auv, wave)
        self.state = np.asarray(s0, dtype=float).copy()
        self.seed = seed
        self.disturbance_bound = disturbance_bound
        self.hold = hold
        self.last_disturbance = np.zeros(4)

    def disturbance(self, t: float) -> np.ndarray:
        return sample_disturbance(
            self.seed, t, self.disturbance_bound, dim=4, hold=self.hold
        )

    def step(self, t: float, u_s, dt: float) -> np.ndarray:
        d_nom = self.disturbance(t)
        self.last_disturbance = d_nom
        self.state = integrate_step(self.field, self.state, u_s, d_nom, t, dt)
        return self.state

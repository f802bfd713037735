"""Mechanical logic from links and rotary joints: simulation and analysis.

The package models the two higher-level structures a links-and-joints
computer is made of -- the lock (mutual exclusion) and the balance (data
routing) -- at two levels: behavioral dual-rail logic that scales to gates,
shift registers and reversible pipelines, and a planar constraint engine
that verifies the same behaviour kinematically.  Closed-form estimators
cover molecular-scale dissipation and MEMS density, and a line-oriented
netlist format drives everything from the command line.
"""

from .clocking import DEFAULT_CLOCK, CamProfile, ClockProgram, ClockReport, \
    Waveform, cam_waveform, trapezoid_cam_profile, validate_clock
from .energy import BOLTZMANN, DragModel, InertialAnalysis, InertialModel, \
    drag_energy_per_joint, energy_time_product, inertial_analysis, \
    landauer_context, mems_density
from .gates import BLANK, ONE, ZERO, DualRailValue, GateKind, Netlist, \
    NetlistBuilder, TruthTable, build_buffer, build_gate, build_mux21, \
    evaluate, evaluate_detailed, evaluate_reverse, instantiate, truth_table
from .kinematics import Configuration, DriveCoord, Joint, LockGeometry, \
    Mechanism, Pose, RigidLink, Vec2, assemble, drive, five_link, four_bar, \
    holding_advantage, lock_connecting_vector, lock_mechanism, mobility, \
    spring_energy, spring_gradient
from .netlist_io import NetlistDocument, parse, serialize
from .primitives import BalanceState, CrosscheckReport, LockState, \
    balance_actuate, balance_deactuate, crosscheck_lock, lock_is_locked, \
    lock_set
from .sequential import AdderPipeline, ChainState, ChainTrace, MooreMachine, \
    ShiftCell, blank_chain, build_ripple_adder, cell_step, chain_reverse, \
    chain_simulate, force_isolation, moore_step, one_bit_memory, \
    retained_cells

__version__ = "0.1.0"

"""Planning and analysis of wavelength-routed star QKD networks."""
from .errors import QRouterError
from .network import (FeasibilityPolicy, LinkBudget, StarNetwork, link_budget,
                      max_reach_km, network_report)
from .photonics import (MuxSpec, db_to_ratio, leak_ratio_per_pass,
                        router_insertion_loss_db, two_pass_crosstalk_ratio,
                        worst_case_crosstalk_sum)
from .transport import (SimConfig, SimReport, compare_to_analytic, simulate_pass,
                        simulate_router_transit)
from .wiring import (WiringPlan, build_plan, demux_port_count, route, verify_plan,
                     wavelength_for)

__version__ = "0.1.0"

"""kleinnet: feedback-loop groups of finite networks and their geometry.

The pipeline: a multigraph's loop structure gives a free group (netgraph,
words); SL(2,C) matrices represent it (sl2); stretching families of
representations degenerate toward tree length functions (degeneration);
two-generator groups draw limit sets on the Riemann sphere (limitset);
finite-index subgroups draw dessins d'enfants (dessin); and the network's
areas carry a toy statevector quantum model (qnet).
"""

__version__ = "0.1.0"

from .errors import KleinnetError

__all__ = ["KleinnetError", "__version__"]

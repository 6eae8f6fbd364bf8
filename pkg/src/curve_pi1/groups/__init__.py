from .presentation import Presentation, PresentationError, parse_presentation, zvk_presentation
from .tietze import TietzeResult, tietze_simplify
from .smith import AbelianInvariants, abelianization, smith_normal_form
from .finite import (HomCountBudgetExceeded, TargetGroupFactory, fingerprint, free_product_count,
                     free_product_fingerprint, hom_count)
from .freeproduct import (FreeProductWord, bounded_hopf_check, eval_hom, find_epimorphism, fp_multiply,
                          fp_normal_form)
from .orbifold import OrbifoldSpec, orbifold_pi1, torus_decomposition_note, torus_pencil_orbifold

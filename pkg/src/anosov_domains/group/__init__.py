from .ball import BallEntry, BallIndex, ball_size, enumerate_ball
from .presentation import (GroupPresentation, RealCharacter, character_eval, character_validate,
                           surface_relator, uniform_norm)
from .words import (Word, conjugacy_key, cyclic_reduce, format_word, free_reduce, inverse,
                    parse_word)

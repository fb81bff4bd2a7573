import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

MARLINS_QUESTION = ("What home of the Florida Marlins is also the birthplace of a notable "
                 "professional athlete who began their career in 1997")
MARLINS_LINEAR = ("What home of the Florida Marlins [DES] is also the birthplace of [INQL] a notable "
               "professional athlete [DES] who began their career in 1997 [INQR]")

# (question, clue, expected decomposition); each clue keeps the sub-question words,
# with their dropped and stray tokens, and the separators of the expected structure
WORKED_CLUES = [
    (
        "What films featuring Taylor Swift have netflix_id numbers above 70068848",
        "what films [DES] featuring swift [DES] have netflix_id numbers above",
        "What films [DES] featuring Taylor Swift [DES] have netflix_id numbers above 70068848",
    ),
    (
        'What schools were attended by the characted of focus in the film "William & Kate"',
        'what schools [DES] were attended by [INQL] the characted of "characted focus & the film" [INQR]',
        'What schools [DES] were attended by [INQL] the characted of focus in the film "William & Kate" [INQR]',
    ),
]


@pytest.fixture
def marlins_linear():
    return MARLINS_LINEAR


@pytest.fixture
def marlins_question():
    return MARLINS_QUESTION

# (candidate, reference) pairs for the text metrics; mixes exact hits, reorderings,
# length mismatches and a pair with no overlap at all
TEXT_PAIRS = [
    ("what films [SEP] featuring taylor swift", "what films [SEP] featuring taylor swift"),
    ("what schools were attended by [SEP] the character", "what schools were attended by [INQ] [SEP] the character of focus"),
    ("the home of the marlins", "what home of the florida marlins"),
    ("a b c d", "a c d"),
    ("who played for the team", "which team did he play for"),
    ("capital of france", "paris is the capital city of france"),
    ("the the the the", "the cat sat on the mat"),
    ("x y z", "p q r s"),
    ("largest city in the country by population", "largest city by population in the country"),
    ("born here in 1997 began career", "began their career in 1997"),
]

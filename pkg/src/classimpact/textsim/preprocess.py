import re

from .porter import stem

_NON_ALNUM = re.compile(r"[\W_]+")
_CAMEL = re.compile(
    r"(?<=[a-z])(?=[A-Z])"        # timeEvent -> time Event
    r"|(?<=[A-Z])(?=[A-Z][a-z])"  # HTTPServer -> HTTP Server
    r"|(?<=[A-Za-z])(?=[0-9])"    # utf8 -> utf 8
    r"|(?<=[0-9])(?=[A-Za-z])"
)


def split_identifiers(text: str) -> str:
    return _CAMEL.sub(" ", text)


def preprocess(text: str, split: bool = False) -> list[str]:
    """Strip non-alphanumerics, optionally split identifiers, lowercase and Porter-stem.

    No stop words are removed.
    """
    if not text:
        return []
    text = _NON_ALNUM.sub(" ", text)
    if split:
        text = split_identifiers(text)
    # lower() can emit combining marks for some scripts, so filter again
    return [stem(tok) for tok in _NON_ALNUM.sub(" ", text.lower()).split()]

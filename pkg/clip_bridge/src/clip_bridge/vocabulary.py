"""The probe vocabulary: what gets embedded, and under which category."""

CATEGORIES = (
    "named_illuminant",
    "kelvin_value",
    "general_lighting",
    "generic_numeral",
)

# category -> terms, four per category; kelvin strings and bare numerals
# use the same digits so shared sub-word tokenization is observable
TERMS = {
    "named_illuminant": ("tungsten", "fluorescent", "cloudy", "shade"),
    "kelvin_value": ("2850K", "3800K", "6500K", "7500K"),
    "generic_numeral": ("2850", "3800", "6500", "7500"),
    "general_lighting": ("bright", "dim", "soft", "harsh"),
}

# sentence-level embeddings wrap the term in this carrier
CARRIER = "a photo of a dog in {} lighting"

LEVELS = ("token", "sentence")


def all_items():
    """(label, category) pairs in stable category-then-term order."""
    out = []
    for category in CATEGORIES:
        for term in TERMS[category]:
            out.append((term, category))
    return out


def sentence_for(term: str) -> str:
    return CARRIER.format(term)

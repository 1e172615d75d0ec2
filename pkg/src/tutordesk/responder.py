"""Template-based response rendering.

Each action maps to exactly one utterance template per locale; the only
dynamic parts are the lettered verification list, the letter menu, and
the single letter being corrected. Values the user dictated verbatim
(after three failed extraction attempts) render with a marker instead of
a catalog title, so the student can spot and fix them.
"""

import json
import re
from importlib import resources

from tutordesk.policy import ACTIONS

_PLACEHOLDER_RE = re.compile(r"\{(\w+)\}")
_ALLOWED_PLACEHOLDERS = {
    "final_request": {"verification_list"},
    "verify_request": {"letters"},
    "correct_request": {"letter"},
}


class TemplateStore:
    """Validated action→template map for every shipped locale."""

    def __init__(self, doc):
        self.default_locale = doc["default_locale"]
        self.locales = doc["locales"]
        self.slot_labels = doc["slot_labels"]
        self.value_labels = doc["value_labels"]
        self.ground_truth_marker = doc["ground_truth_marker"]
        self._validate()

    def _validate(self):
        if self.default_locale not in self.locales:
            raise ValueError(f"default locale {self.default_locale!r} not shipped")
        for locale, templates in self.locales.items():
            missing = set(ACTIONS) - set(templates)
            extra = set(templates) - set(ACTIONS)
            if missing or extra:
                raise ValueError(
                    f"locale {locale!r}: one template per action required "
                    f"(missing={sorted(missing)}, unknown={sorted(extra)})"
                )
            for action, template in templates.items():
                allowed = _ALLOWED_PLACEHOLDERS.get(action, set())
                used = set(_PLACEHOLDER_RE.findall(template))
                if not used <= allowed:
                    raise ValueError(
                        f"template {locale}/{action} uses unavailable "
                        f"placeholders {sorted(used - allowed)}"
                    )
        for table_name in ("slot_labels", "value_labels", "ground_truth_marker"):
            table = getattr(self, table_name)
            for locale in self.locales:
                if locale not in table:
                    raise ValueError(f"{table_name} missing locale {locale!r}")


def load_templates(path=None) -> TemplateStore:
    if path is None:
        raw = resources.files("tutordesk.data").joinpath("templates.json").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    return TemplateStore(json.loads(raw))


class Responder:
    def __init__(self, store: TemplateStore, catalog, locale: str = None):
        self.store = store
        self.catalog = catalog
        self.locale = locale or store.default_locale
        if self.locale not in store.locales:
            raise ValueError(f"locale {self.locale!r} not in template store")

    def display_value(self, slot: str, value: str, kind: str = "extracted") -> str:
        if kind == "user_ground_truth":
            return value + self.store.ground_truth_marker[self.locale]
        if slot in ("topic", "subtopic"):
            return self.catalog.display_value(slot, value)
        labels = self.store.value_labels[self.locale]
        if value in labels:
            return labels[value]
        return self.catalog.display_value(slot, value)

    def verification_list(self, payload) -> str:
        labels = self.store.slot_labels[self.locale]
        lines = []
        for i, (letter, slot, value, kind) in enumerate(payload):
            tail = "." if i == len(payload) - 1 else ","
            lines.append(
                f"{letter}) {labels[slot]}: {self.display_value(slot, value, kind)}{tail}"
            )
        return "\n".join(lines)

    def render(self, action: str, info, payload=None, letter: str = None) -> str:
        template = self.store.locales[self.locale][action]
        if action == "final_request":
            return template.format(verification_list=self.verification_list(payload))
        if action == "verify_request":
            letters = ", ".join(letter for letter, _, _, _ in payload)
            return template.format(letters=letters)
        if action == "correct_request":
            return template.format(letter=letter)
        return template

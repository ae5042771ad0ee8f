"""Shared test fixtures: the labeled example corpus for the error taxonomy,
a hand-built BLEU pair fixture, and builders for the end-to-end corpus."""

from __future__ import annotations

import json
from pathlib import Path

from lexigen.errors import ErrorLabel
from lexigen.lexicon import Lemma, PosTag

CIRC = ErrorLabel.CIRCULAR_DEFINITION
NAV = ErrorLabel.NOUN_AS_VERB
LANG = ErrorLabel.LANGUAGE_INTERFERENCE
DEGEN = ErrorLabel.DEGENERATE

# Real generated definitions with hand-derived labels under the stated
# detector rules. The five entries marked `pinned` are the classification
# contract; the rest document detector behavior over the whole corpus.
LABELED_CORPUS: list[tuple[Lemma, str, frozenset[ErrorLabel], bool]] = [
    # adequate: nouns
    (Lemma("exotismo", PosTag.NOUN),
     "La cualidad de lo que es exótico o extraño, especialmente en relación con la cultura y la naturaleza.",
     frozenset(), False),
    (Lemma("camisón", PosTag.NOUN),
     "Una prenda de vestir ligera y suelta, normalmente de algodón, que se usa para dormir.",
     frozenset(), False),
    (Lemma("pillería", PosTag.NOUN),
     "Acto de robar o tomar algo sin permiso.",
     frozenset(), False),
    # adequate: verbs
    (Lemma("guiar", PosTag.VERB), "dirigir una persona o un grupo.", frozenset(), True),
    (Lemma("parir", PosTag.VERB), "dar a luz a un bebé.", frozenset(), False),
    (Lemma("coagular", PosTag.VERB), "formar coágulos.", frozenset(), False),
    # adequate: adjectives
    (Lemma("arrendable", PosTag.ADJECTIVE), "Que se puede alquilar.", frozenset(), False),
    (Lemma("candente", PosTag.ADJECTIVE), "Ardiente o intenso.", frozenset(), False),
    # adequate: adverbs
    (Lemma("peculiarmente", PosTag.ADVERB), "de manera particular.", frozenset(), False),
    # one-word synonym gloss: fine for a human, but mechanically one token
    (Lemma("otrora", PosTag.ADVERB, True), "antiguamente.", frozenset({DEGEN}), False),
    # adequate: neologisms (several open with the lemma, which the circular
    # rule flags by design)
    (Lemma("antibotellón", PosTag.NOUN, True),
     "Antibotellón es una iniciativa para prevenir la reunión de grandes grupos de "
     "personas en espacios públicos para beber alcohol y evitar los disturbios asociados.",
     frozenset({CIRC}), False),
    (Lemma("mainstream", PosTag.NOUN, True),
     "Lo que es ampliamente aceptado o popular en una cultura, una comunidad o una sociedad.",
     frozenset(), False),
    (Lemma("phising", PosTag.NOUN, True),
     "El phising es una forma de fraude cibernético que consiste en el uso de correos "
     "electrónicos o mensajes de texto fraudulentos para obtener información confidencial, "
     "como nombres de usuario y contraseñas.",
     frozenset({CIRC}), False),
    (Lemma("fomo", PosTag.NOUN, True),
     'FOMO es un acrónimo de "miedo a perderse", y se refiere a la ansiedad que uno '
     "puede sentir cuando ve que otros están disfrutando de algo que él o ella no está haciendo.",
     frozenset({CIRC}), False),
    (Lemma("nomofobia", PosTag.NOUN, True),
     "Es el miedo excesivo a estar desconectado de la tecnología, especialmente de los "
     "teléfonos inteligentes.",
     frozenset(), False),
    (Lemma("googlear", PosTag.VERB, True),
     "Buscar información en Internet usando el motor de búsqueda de Google.",
     frozenset(), False),
    (Lemma("polimedicar", PosTag.VERB, True),
     "Polimedicar es un término médico que se refiere a la práctica de tratar a un "
     "paciente con varias medicinas o terapias al mismo tiempo.",
     frozenset({CIRC}), False),
    # failures: circular formula
    (Lemma("campeonato", PosTag.NOUN),
     "Un campeonato es una competición para determinar quién es el mejor en algo.",
     frozenset({CIRC}), True),
    (Lemma("negacionismo", PosTag.NOUN),
     "El negacionismo es una actitud consistente en negar o discutir la existencia de "
     "un hecho o una realidad.",
     frozenset({CIRC}), False),
    # failures: lemma split by the tokenizer (only detectable from the text
    # as degenerate one-worders, if at all)
    (Lemma("re", PosTag.NOUN), "monarca", frozenset({DEGEN}), False),
    (Lemma("tona", PosTag.NOUN),
     "Una tona es una medida de volumen equivalente a 1000 kilogramos.",
     frozenset({CIRC}), False),
    (Lemma("adoquiera", PosTag.ADVERB), "adquirir algo.", frozenset(), False),
    # failures: noun defined as a verb
    (Lemma("paragranizo", PosTag.NOUN),
     "Verbo que significa proteger con una granizada.",
     frozenset({NAV}), False),
    (Lemma("pare", PosTag.NOUN),
     "Pare es un verbo que significa detener algo, detener a alguien o interrumpir una acción.",
     frozenset({NAV, CIRC}), True),
    (Lemma("lleve", PosTag.NOUN),
     "El verbo llevar significa transportar algo de un lugar a otro.",
     frozenset({NAV}), False),
    # failures: English leaking in
    (Lemma("relva", PosTag.NOUN), "Grass.", frozenset({LANG, DEGEN}), True),
    (Lemma("sueldacostilla", PosTag.NOUN), "Paycheck.", frozenset({LANG, DEGEN}), False),
    # failures: related but wrong (not machine-detectable)
    (Lemma("maquis", PosTag.NOUN),
     "Una zona de bosque o maleza en la que los combatientes se ocultan para luchar "
     "contra una ocupación militar.",
     frozenset(), False),
    (Lemma("baleario", PosTag.ADJECTIVE),
     "Una región insular del mar Mediterráneo, compuesta por las islas Baleares.",
     frozenset(), False),
    (Lemma("zampabollos", PosTag.NOUN),
     "Persona que se dedica a vender bollos por la calle.",
     frozenset(), False),
    # failures: plain wrong (world knowledge, not machine-detectable)
    (Lemma("ll", PosTag.NOUN), 'Abreviatura de la expresión "Llámame".', frozenset(), False),
    (Lemma("yangüés", PosTag.NOUN), "Pájaro de la familia de los estorninos.", frozenset(), False),
    (Lemma("napoleón", PosTag.NOUN), "Napoleon.", frozenset({DEGEN}), False),
    (Lemma("menos", PosTag.ADVERB), "menos.", frozenset({DEGEN, CIRC}), True),
    # failures: neologism defined as a related term
    (Lemma("pagafantas", PosTag.NOUN, True),
     "Persona que invita a los demás a salir o a tomar algo sin tener intención de "
     "pagar la cuenta.",
     frozenset(), False),
    (Lemma("telonear", PosTag.VERB, True),
     "Ver una película en una pantalla grande, como una sala de cine.",
     frozenset(), False),
    (Lemma("chandalismo", PosTag.NOUN, True),
     "El chandalismo se refiere al comportamiento de personas que, sin ningún motivo, "
     "destruyen o dañan bienes públicos o privados.",
     frozenset({CIRC}), False),
]


def pinned_examples():
    return [(lemma, text, labels) for lemma, text, labels, pinned in LABELED_CORPUS if pinned]


# 20 candidate/reference token pairs for checking corpus BLEU against the
# naive oracle: mixed overlap, repeats (clipping), length mismatches.
BLEU_FIXTURE_PAIRS: list[tuple[tuple[str, ...], tuple[str, ...]]] = [
    (("el", "perro", "ladra"), ("el", "perro", "ladra")),
    (("un", "animal", "doméstico"), ("animal", "doméstico", "muy", "común")),
    (("cosa", "que", "sirve", "para", "medir"), ("instrumento", "que", "sirve", "para", "medir")),
    (("la", "la", "la"), ("la", "casa")),
    (("persona", "que", "estudia"), ("persona", "que", "estudia", "los", "astros")),
    (("de", "manera", "particular"), ("de", "forma", "particular")),
    (("fruta", "tropical"), ("planta", "de", "fruto", "comestible")),
    (("acción", "de", "medir"), ("acción", "y", "efecto", "de", "medir")),
    (("que", "no", "tiene", "fin"), ("que", "no", "tiene", "término")),
    (("lugar", "donde", "se", "guarda", "el", "vino"), ("bodega", "para", "el", "vino")),
    (("relativo", "al", "mar"), ("perteneciente", "o", "relativo", "al", "mar")),
    (("mueble", "para", "dormir"), ("mueble", "que", "se", "usa", "para", "dormir")),
    (("sin", "ruido"), ("que", "carece", "de", "ruido")),
    (("ave", "de", "rapiña"), ("ave", "rapaz", "de", "gran", "tamaño")),
    (("el", "que", "vende", "pan"), ("persona", "que", "hace", "o", "vende", "pan")),
    (("tela", "fuerte",), ("tejido", "resistente")),
    (("se", "dice", "de", "lo", "que", "brilla"), ("que", "brilla", "mucho")),
    (("medida", "de", "longitud"), ("unidad", "de", "medida", "de", "longitud")),
    (("dar", "a", "luz"), ("parir", "dar", "a", "luz")),
    (("pequeño", "y", "delicado"), ("pequeño", "fino", "y", "delicado")),
]


# --- end-to-end corpus ----------------------------------------------------------

_E2E_WORDS = [
    # 30 with POS, a few neologisms sprinkled in
    ("casa", "N", False), ("perro", "N", False), ("camino", "N", False),
    ("montaña", "N", False), ("libro", "N", False), ("ventana", "N", False),
    ("pare", "N", False), ("campeonato", "N", False), ("relva", "N", False),
    ("fomo", "N", True), ("phising", "N", True), ("antibotellón", "N", True),
    ("guiar", "V", False), ("parir", "V", False), ("coagular", "V", False),
    ("medir", "V", False), ("construir", "V", False), ("googlear", "V", True),
    ("transportar", "V", False), ("limpiar", "V", False),
    ("arrendable", "ADJ", False), ("candente", "ADJ", False),
    ("ligero", "ADJ", False), ("antiguo", "ADJ", False), ("suave", "ADJ", False),
    ("frecuente", "ADJ", False),
    ("otrora", "ADV", False), ("peculiarmente", "ADV", False),
    ("menos", "ADV", False), ("apenas", "ADV", False),
    # 20 without POS
    ("sustancia", None, False), ("fenómeno", None, False), ("costumbre", None, False),
    ("herramienta", None, False), ("alimento", None, False), ("prenda", None, False),
    ("máquina", None, False), ("juego", None, False), ("materia", None, False),
    ("proceso", None, False), ("grupo", None, False), ("sentimiento", None, False),
    ("instrumento", None, False), ("lugar", None, False), ("objeto", None, False),
    ("persona", None, False), ("animal", None, False), ("planta", None, False),
    ("técnica", None, False), ("chandalismo", None, True),
]

# the last five lemmas stay out of the reference file -> "skipped: 5"
E2E_MISSING_FROM_REFS = 5
# first 15 reference entries are polysemous (2-4 senses), the rest monosemous
E2E_POLYSEMOUS = 15


def e2e_lemma_file_text() -> str:
    lines = ["# end-to-end fixture: 50 lemmas"]
    for surface, pos, neo in _E2E_WORDS:
        columns = [surface]
        if pos is not None or neo:
            columns.append(pos or "")
        if neo:
            columns.append("neo")
        lines.append("\t".join(columns))
    return "\n".join(lines) + "\n"


def write_e2e_lemmas(path: Path) -> int:
    path.write_text(e2e_lemma_file_text(), encoding="utf-8")
    return len(_E2E_WORDS)


def _ref_sense_texts(surface: str, index: int) -> list[str]:
    if index < E2E_POLYSEMOUS:
        n_senses = 2 + index % 3
        return [
            f"sentido {k} de {surface}, descrito con detalle propio nivel {k}."
            for k in range(1, n_senses + 1)
        ]
    return [f"definición de referencia de {surface}, breve y precisa."]


def write_e2e_refs(path: Path) -> dict[str, int]:
    """Write the reference file; returns surface -> sense count."""
    counts = {}
    with open(path, "w", encoding="utf-8") as fh:
        for index, (surface, _pos, _neo) in enumerate(_E2E_WORDS):
            if index >= len(_E2E_WORDS) - E2E_MISSING_FROM_REFS:
                continue
            senses = _ref_sense_texts(surface, index)
            counts[surface] = len(senses)
            fh.write(json.dumps({"lemma": surface, "senses": senses}, ensure_ascii=False) + "\n")
    return counts

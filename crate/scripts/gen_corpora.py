#!/usr/bin/env python3
"""Generate the labeled intent and extraction corpora under crates/core/tests/fixtures.

Every expected label comes from the template that produced the text, never from
the extractor. Output is deterministic for a given seed.

    python3 scripts/gen_corpora.py [--seed 2024] [--per-form 300]
"""

import argparse
import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures"

# (name as written, GateId, arity)
GATE_NAMES = [
    ("Hadamard", "H", 1), ("H", "H", 1), ("Pauli-X", "X", 1), ("X", "X", 1), ("NOT", "X", 1),
    ("bit-flip", "X", 1), ("Pauli-Y", "Y", 1), ("Y", "Y", 1), ("Pauli-Z", "Z", 1), ("Z", "Z", 1),
    ("phase-flip", "Z", 1), ("S", "S", 1), ("S-dagger", "Sdg", 1), ("S†", "Sdg", 1),
    ("identity", "I", 1), ("phase", "Phase", 1), ("Rx", "Rx", 1), ("Ry", "Ry", 1), ("Rz", "Rz", 1),
    ("CNOT", "CNOT", 2), ("CX", "CNOT", 2), ("controlled-NOT", "CNOT", 2), ("CZ", "CZ", 2),
    ("controlled-Z", "CZ", 2), ("SWAP", "SWAP", 2),
]
KETS_1 = ["|0⟩", "|1⟩", "|0>", "|1>", "(|0⟩+|1⟩)/sqrt(2)", "0.6|0⟩+0.8|1⟩", "1/√2|0⟩ - 1/√2|1⟩"]
KETS_2 = ["|00⟩", "|01⟩", "|10⟩", "|11⟩", "|10>", "(|00⟩+|11⟩)/sqrt(2)", "0.6|01⟩+0.8|10⟩"]

DEFINE_T = [
    "What is the {g} gate?", "Define the {g} gate.", "Explain the {g} gate to me.",
    "What does the {g} gate do?", "Can you describe the {g} gate?", "Tell me about the {g} gate.",
    "What's the matrix of the {g} gate?", "I would like a definition of the {g} gate.",
    "How does the {g} gate work?", "What is the purpose of the {g} gate?",
    "Give me the unitary of the {g} gate.", "what is the {g} gate",
]
DRAW_T = [
    "Draw the {g} gate.", "Show me the circuit for the {g} gate.", "Can you draw the {g} gate?",
    "Sketch a circuit diagram of the {g} gate.", "What does the {g} gate look like in a circuit?",
    "Display the {g} gate as a circuit.", "Visualize the {g} gate.",
    "I need a picture of the {g} gate.", "Render the {g} gate in a quantum circuit.",
    "Give me a circuit representation of the {g} gate.", "draw {g} gate please",
]
APPLY_T = [
    "Apply the {g} gate to {k}.", "What is the final state after applying the {g} gate to {k}?",
    "If the qubits start in {k}, what does the {g} gate produce?",
    "Start in {k} and apply the {g} gate.", "What happens when the {g} gate acts on {k}?",
    "Use {k} as the initial state and apply the {g} gate.",
    "Compute the state after the {g} gate with input {k}.",
    "What do I get if I apply the {g} gate on {k}?", "{g} gate on {k}, what is the result?",
]
UNKNOWN_T = [
    "Hello!", "What time is it?", "Tell me a joke.", "How is the weather today?",
    "Who wrote Hamlet?", "What is your name?", "Thanks, that was helpful.", "Good morning",
    "Can you recommend a book?", "What is the capital of France?", "Translate hello into German.",
    "How old are you?", "Sing me a song.", "What is love?", "Is it going to rain tomorrow?",
    "Who won the football match?", "Open the pod bay doors.", "What is two plus two?",
    "I am bored.", "Let's chat about music.",
]

CITIES = [
    "Bern", "Basel", "Zurich", "Geneva", "Lausanne", "Lucerne", "Lugano", "Chur", "Sion",
    "Aarau", "Thun", "Biel", "Fribourg", "Neuchatel", "Winterthur", "Zug", "Olten", "Vienna",
    "Munich", "Milan", "Lyon", "Paris", "Berlin", "Hamburg", "Oslo", "Rome", "Madrid",
    "New York", "San Francisco", "Los Angeles", "Baden-Baden", "St Gallen", "Den Haag", "Prague",
]
ITEMS = [
    "laptop", "camera", "book", "tent", "stove", "lamp", "water bottle", "sleeping bag",
    "jacket", "map", "radio", "first aid kit", "rope", "knife", "blanket", "phone", "tablet",
    "guitar", "kettle", "pillow", "towel", "umbrella", "flashlight", "notebook",
]

ANGLES = [
    "pi/2", "pi/4", "π/2", "π/3", "3π/4", "2*pi/3", "pi", "π/8", "0.25", "0.5", "1.2", "0.75",
    "45 degrees", "90 degrees", "30°", "60°", "120 degrees", "1.5 rad", "0.3 radians", "-pi/2",
]


def join_list(rng, names):
    if len(names) == 2:
        return f"{names[0]} and {names[1]}"
    sep = rng.choice([" and ", ", and ", " & "])
    return ", ".join(names[:-1]) + sep + names[-1]


def intent_records(rng, per_intent):
    out = []
    for intent, templates in (("define_gate", DEFINE_T), ("draw_gate", DRAW_T), ("apply_gate", APPLY_T)):
        for n in range(per_intent):
            name, gate, arity = GATE_NAMES[n % len(GATE_NAMES)]
            t = templates[rng.randrange(len(templates))]
            if intent == "apply_gate":
                k = rng.choice(KETS_2 if arity == 2 else KETS_1)
                if gate == "Phase":
                    text = f"Apply the phase gate with phase {rng.choice(ANGLES)} to {k}."
                elif gate in ("Rx", "Ry", "Rz"):
                    text = rng.choice([
                        f"Apply {name}({rng.choice(ANGLES)}) to {k}.",
                        f"What is the state after {name}({rng.choice(ANGLES)}) acts on {k}?",
                    ])
                else:
                    text = t.format(g=name, k=k)
            else:
                text = t.format(g=name)
            out.append({"text": text, "expected_intent": intent, "expected_gate": gate})
    for _ in range(per_intent):
        out.append({"text": tsp_instance(rng)["context"], "expected_intent": "solve_tsp"})
    for _ in range(per_intent):
        out.append({"text": kp_instance(rng)["context"], "expected_intent": "solve_kp"})
    for t in UNKNOWN_T:
        out.append({"text": t, "expected_intent": "unknown"})
    return out


def tsp_instance(rng):
    n = rng.randint(2, 4)
    cities = rng.sample(CITIES, n)
    pairs = [(cities[i], cities[j]) for i in range(n) for j in range(i + 1, n)]
    facts = []  # (from, to, value text)
    sentences = []
    for a, b in pairs:
        if rng.random() < 0.5:
            a, b = b, a
        d = str(rng.randint(5, 900))
        unit = rng.choice(["km", "km", "miles", "kilometers"])
        form = rng.randrange(5)
        if form == 0:
            s = f"The distance from {a} to {b} is {d} {unit}."
        elif form == 1:
            s = f"{a} to {b} is {d} {unit}."
        elif form == 2:
            s = f"Between {a} and {b} there are {d} {unit}."
        elif form == 3:
            s = f"It is {d} {unit} from {a} to {b}."
        else:
            s = f"The trip from {a} to {b} takes {d} {unit}."
        sentences.append(s)
        facts.append((a, b, d))
    listed = join_list(rng, cities)
    opener = rng.choice([
        f"A salesperson wants to visit {listed}.",
        f"I need to plan a round trip through {listed}.",
        f"Find the shortest route that visits {listed}.",
        f"Our delivery tour covers {listed}.",
        f"Plan a tour of the cities {listed}.",
        f"Help me travel to {listed} and return home.",
    ])
    closer = rng.choice([
        "What is the shortest round trip?", "Which order minimizes the total distance?",
        "Find the best route.", "", "Each city must be visited once.",
    ])
    context = " ".join(x for x in [opener, " ".join(sentences), closer] if x)
    return {"context": context, "list_span": listed, "facts": facts, "cities": cities}


def kp_instance(rng):
    n = rng.randint(2, 4)
    items = rng.sample(ITEMS, n)
    weights = [str(rng.randint(1, 9)) for _ in items]
    values = [str(rng.randint(1, 30)) for _ in items]
    cap = str(rng.randint(5, 20))
    arts = ["an" if it[0] in "aeiou" else "a" for it in items]
    listed = join_list(rng, [f"{a} {it}" for a, it in zip(arts, items)])
    opener = rng.choice([
        f"I can choose from {listed}.",
        f"The items are {listed}.",
        f"I have {len(items)} items: {listed}.",
        f"I want to pack {listed}.",
        f"Available items: {listed}.",
    ])
    form = rng.randrange(4)
    if form == 0:
        body = " ".join(
            f"The {it} weighs {w} kg and is worth {v} {rng.choice(['points', 'dollars', ''])}".rstrip() + "."
            for it, w, v in zip(items, weights, values)
        )
    elif form == 1:
        body = " ".join(
            f"The {it} has a weight of {w} kg and a value of {v}." for it, w, v in zip(items, weights, values)
        )
    elif form == 2:
        ws = ", ".join(f"{it} {w} kg" for it, w in zip(items, weights))
        vs = ", ".join(f"{it} {v}" for it, v in zip(items, values))
        body = f"Weights: {ws}. Values: {vs}."
    else:
        body = (
            f"Their weights are {join_list(rng, weights)} kg and their values are "
            f"{join_list(rng, values)}, respectively."
        )
    cap_s = rng.choice([
        f"My knapsack holds at most {cap} kg.",
        f"The backpack has a capacity of {cap} kg.",
        f"I can carry up to {cap} kg.",
        f"The weight limit is {cap} kg.",
        f"I have a {cap} kg knapsack.",
    ])
    closer = rng.choice(["Which items should I take to maximize the value?", "", "Maximize the total value."])
    parts = [cap_s, opener, body, closer] if rng.random() < 0.4 else [opener, body, cap_s, closer]
    context = " ".join(x for x in parts if x)
    return {
        "context": context, "list_span": listed, "items": items,
        "weights": weights, "values": values, "capacity": cap,
    }


def record(context, form, expected, **slots):
    r = {"context": context, "question_form": form}
    if slots:
        r["slots"] = slots
    r["expected_span"] = expected
    assert expected in context, (expected, context)
    return r


def phase_context(rng, adversarial=False):
    a = rng.choice(ANGLES)
    if adversarial:
        k = rng.choice(["0.6|0⟩+0.8|1⟩", "0.8|0⟩ - 0.6|1⟩", "3/5|0⟩+4/5|1⟩", "1/√2|0⟩+1/√2|1⟩"])
        t = rng.choice([
            f"Apply the phase gate to {k} with a shift of {a}.",
            f"Take the state {k} and apply a phase gate whose phase is {a}.",
            f"Phase shift {k} by {a}.",
            f"With phase {a}, act on {k} with the phase gate.",
        ])
        return t, a
    k = rng.choice(KETS_1)
    t = rng.choice([
        f"Apply a phase gate with phase {a} to {k}.",
        f"Apply P({a}) to {k}.",
        f"What is the phase gate with a phase shift of {a}?",
        f"Draw a phase gate with shift {a}.",
        f"Use a phase shift of {a} on the state {k}.",
        f"The qubit is in state {k}; apply the phase gate with φ = {a}.",
        f"Phase gate, phase {a}, initial state {k}.",
    ])
    return t, a


def rotation_context(rng):
    a = rng.choice([x for x in ANGLES if not x.startswith("-")])
    axis = rng.choice("xyz")
    k = rng.choice(KETS_1)
    form = rng.randrange(6)
    if form == 0:
        t, ax_span = f"Rotate {k} around the {axis}-axis by {a}.", axis
    elif form == 1:
        t, ax_span = f"Apply R{axis}({a}) to {k}.", axis
    elif form == 2:
        t, ax_span = f"What does a rotation of {a} about the {axis} axis do to {k}?", axis
    elif form == 3:
        t, ax_span = f"Apply an {axis.upper()} rotation with angle {a} to qubit 0 in state {k}.", axis.upper()
    elif form == 4:
        t, ax_span = f"Rotate the qubit by {a} around {axis}, starting from {k}.", axis
    else:
        t, ax_span = f"Draw a rotation gate about the {axis} axis with angle {a}.", axis
    return t, a, ax_span


def extraction_records(rng, per_form):
    out = []
    for _ in range(per_form):
        t, a = phase_context(rng)
        out.append(record(t, "phase_shift", a))
    for _ in range(per_form):
        t, a, _ = rotation_context(rng)
        out.append(record(t, "rotation_angle", a))
    for _ in range(per_form):
        t, _, ax = rotation_context(rng)
        out.append(record(t, "rotation_axis", ax))
    for _ in range(per_form):
        inst = tsp_instance(rng)
        out.append(record(inst["context"], "tsp_cities", inst["list_span"]))
    for _ in range(per_form):
        inst = tsp_instance(rng)
        a, b, d = rng.choice(inst["facts"])
        if rng.random() < 0.5:
            a, b = b, a
        out.append(record(inst["context"], "tsp_distance", d, city1=a, city2=b))
    for _ in range(per_form):
        inst = kp_instance(rng)
        out.append(record(inst["context"], "kp_items", inst["list_span"]))
    for _ in range(per_form):
        inst = kp_instance(rng)
        out.append(record(inst["context"], "kp_max_weight", inst["capacity"]))
    for attr, form in (("weights", "kp_item_weight"), ("values", "kp_item_value")):
        for _ in range(per_form):
            inst = kp_instance(rng)
            i = rng.randrange(len(inst["items"]))
            out.append(record(inst["context"], form, inst[attr][i], item=inst["items"][i]))
    return out


def adversarial_records(rng, n):
    out = []
    for _ in range(n):
        t, a = phase_context(rng, adversarial=True)
        out.append(record(t, "phase_shift", a))
    return out


def write(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--per-form", type=int, default=300)
    ap.add_argument("--per-intent", type=int, default=60)
    args = ap.parse_args()
    OUT.mkdir(parents=True, exist_ok=True)
    write(OUT / "intent_corpus.jsonl", intent_records(random.Random(args.seed), args.per_intent))
    write(OUT / "extraction_corpus.jsonl", extraction_records(random.Random(args.seed + 1), args.per_form))
    write(OUT / "adversarial_phase.jsonl", adversarial_records(random.Random(args.seed + 2), args.per_form))


if __name__ == "__main__":
    main()

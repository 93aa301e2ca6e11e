"""The .scn scenario format: parse, serialize, instantiate.

Line-oriented block grammar, versioned with a mandatory `version 1` header:

    version 1
    scenario <name>
    description "<free text>"          # optional
    mode semantic | symbolic | both

    worlds w1 w2 ...                   # carrier: powerset of worlds, or
    poset                              # explicit order (one decl per file)
      a < b
      lonely                           # element with no declared edges
    end

    prop NAME = <ground term>          # proposition atoms

    agent NAME
      sees <generator> -> <ground term>    # appearance on join-irreducibles
      def f[NAME](ATOM) = <term>           # symbolic appearance definition
    end

    action NAME
      communication
      update <generator> -> <ground term>
      appears AGENT -> ACTION          # f'_AGENT(this) = ACTION; default: itself
      kernel ATOM ...
    end

    facts ATOM ...

    query ID check <term> |= <term> [expect holds|fails]
    query ID prove <term> |= <term> [depth N]
    query ID evaluate <term>
    query ID validate-axioms

Comments start with '#'. Appearance and update maps are declared on
join-irreducibles only (worlds, for powerset carriers); full tables are
never written by hand. The serializer is canonical: parse(serialize(doc))
is structurally equal to doc.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    KernelMismatch,
    MissingGenerator,
    ParseError,
    ResolutionError,
)
from . import dynamics, epistemic, lattice as lattice_mod
from .semantics import SemanticModel, eval_term
from . import terms as T
from .terms import Assumptions, Term, _TermParser, render_term

MODES = ("semantic", "symbolic", "both")
QUERY_KINDS = ("check", "prove", "evaluate", "validate-axioms")


@dataclass(frozen=True)
class AgentDecl:
    name: str
    sees: tuple = ()        # ((generator label, ground term), ...)
    defs: tuple = ()        # ((atom, term), ...)


@dataclass(frozen=True)
class ActionDecl:
    name: str
    communication: bool = False
    updates: tuple = ()     # ((generator label, ground term), ...)
    appears: tuple = ()     # ((agent, action), ...)
    kernel: tuple = ()      # (atom, ...)


@dataclass(frozen=True)
class Query:
    id: str
    kind: str
    lhs: Term | None = None
    rhs: Term | None = None
    expect: str = "holds"   # check queries only
    depth: int | None = None  # prove queries only


@dataclass(frozen=True)
class ScenarioDoc:
    name: str
    mode: str
    version: int = 1
    description: str | None = None
    worlds: tuple = ()
    poset_elements: tuple = ()
    poset_edges: tuple = ()
    props: tuple = ()       # ((name, ground term), ...)
    agents: tuple = ()
    actions: tuple = ()
    facts: tuple = ()
    queries: tuple = ()

    @property
    def has_poset(self) -> bool:
        return bool(self.poset_elements)


# -- parsing ---------------------------------------------------------------


class _Lines:
    def __init__(self, text: str):
        self.raw = text.splitlines()
        self.i = 0

    def next_significant(self):
        """(line_number, stripped text, indent column) or None at the end."""
        while self.i < len(self.raw):
            line = self.raw[self.i]
            self.i += 1
            body = line.split("#", 1)[0].rstrip()
            if body.strip():
                indent = len(body) - len(body.lstrip()) + 1
                return self.i, body.strip(), indent
        return None

    def push_back(self):
        self.i -= 1


def _split_arrow(lineno, text, col):
    if "->" not in text:
        raise ParseError(lineno, col, "missing '->'")
    left, right = text.split("->", 1)
    return left.strip(), right.strip(), col + text.index("->") + 2


def _parse_term_at(lineno, text, col) -> Term:
    p = _TermParser(text, line=lineno, column_offset=col - 1)
    t = p.parse_term()
    p.finish()
    return t


def parse_scenario(text: str) -> ScenarioDoc:
    """Parse scenario text; raises ParseError / ResolutionError with
    locations. All cross-references are checked before returning."""
    lines = _Lines(text)

    first = lines.next_significant()
    if first is None:
        raise ParseError(1, 1, "empty scenario")
    lineno, body, col = first
    if body.split() != ["version", "1"]:
        raise ParseError(lineno, col, f"expected 'version 1', found {body!r}")

    name = None
    description = None
    mode = None
    worlds: list[str] = []
    poset_elements: list[str] = []
    poset_edges: list[tuple[str, str]] = []
    carrier_declared = False
    props: list[tuple[str, Term]] = []
    agents: list[AgentDecl] = []
    actions: list[ActionDecl] = []
    facts: list[str] = []
    queries: list[Query] = []

    while True:
        item = lines.next_significant()
        if item is None:
            break
        lineno, body, col = item
        words = body.split()
        head = words[0]

        if head == "scenario":
            if len(words) != 2:
                raise ParseError(lineno, col, "scenario wants exactly one name")
            name = words[1]
        elif head == "description":
            rest = body[len("description"):].strip()
            if not (rest.startswith('"') and rest.endswith('"') and len(rest) >= 2):
                raise ParseError(lineno, col, "description wants a double-quoted string")
            description = rest[1:-1]
        elif head == "mode":
            if len(words) != 2 or words[1] not in MODES:
                raise ParseError(lineno, col, "mode must be semantic, symbolic or both")
            mode = words[1]
        elif head == "worlds":
            if carrier_declared:
                raise ParseError(lineno, col, "carrier already declared")
            if len(words) < 2:
                raise ParseError(lineno, col, "worlds wants at least one label")
            worlds = words[1:]
            carrier_declared = True
        elif head == "poset":
            if carrier_declared:
                raise ParseError(lineno, col, "carrier already declared")
            carrier_declared = True
            seen: dict[str, None] = {}
            while True:
                sub = lines.next_significant()
                if sub is None:
                    raise ParseError(lineno, col, "poset block not closed with 'end'")
                slineno, sbody, scol = sub
                if sbody == "end":
                    break
                parts = sbody.split()
                if len(parts) == 1:
                    seen.setdefault(parts[0])
                elif len(parts) == 3 and parts[1] == "<":
                    seen.setdefault(parts[0])
                    seen.setdefault(parts[2])
                    poset_edges.append((parts[0], parts[2]))
                else:
                    raise ParseError(slineno, scol, "poset lines are 'a < b' or a bare element")
            poset_elements = list(seen)
        elif head == "prop":
            rest = body[len("prop"):].strip()
            if "=" not in rest:
                raise ParseError(lineno, col, "prop wants 'prop NAME = term'")
            pname, expr = (s.strip() for s in rest.split("=", 1))
            if not pname.isidentifier():
                raise ParseError(lineno, col, f"bad proposition name {pname!r}")
            term = _parse_term_at(lineno, expr, col + body.index("=") + 1)
            props.append((pname, term))
        elif head == "agent":
            if len(words) != 2:
                raise ParseError(lineno, col, "agent wants exactly one name")
            agents.append(_parse_agent_block(lines, lineno, col, words[1]))
        elif head == "action":
            if len(words) != 2:
                raise ParseError(lineno, col, "action wants exactly one name")
            actions.append(_parse_action_block(lines, lineno, col, words[1]))
        elif head == "facts":
            facts.extend(words[1:])
        elif head == "query":
            queries.append(_parse_query(lineno, body, col))
        else:
            raise ParseError(lineno, col, f"unknown declaration {head!r}")

    if name is None:
        raise ParseError(1, 1, "missing 'scenario <name>' header")
    if mode is None:
        raise ParseError(1, 1, "missing 'mode' declaration")
    if not carrier_declared:
        raise ParseError(1, 1, "missing carrier declaration (worlds or poset)")

    doc = ScenarioDoc(
        name=name,
        mode=mode,
        description=description,
        worlds=tuple(worlds),
        poset_elements=tuple(poset_elements),
        poset_edges=tuple(poset_edges),
        props=tuple(props),
        agents=tuple(agents),
        actions=tuple(actions),
        facts=tuple(facts),
        queries=tuple(queries),
    )
    _resolve(doc)
    return doc


def _parse_agent_block(lines, lineno, col, name) -> AgentDecl:
    sees, defs = [], []
    while True:
        item = lines.next_significant()
        if item is None:
            raise ParseError(lineno, col, f"agent block {name!r} not closed with 'end'")
        slineno, body, scol = item
        if body == "end":
            return AgentDecl(name, tuple(sees), tuple(defs))
        if body.startswith("sees "):
            gen, rhs, rhs_col = _split_arrow(slineno, body[len("sees "):], scol + 5)
            sees.append((gen, _parse_term_at(slineno, rhs, rhs_col)))
        elif body.startswith("def "):
            rest = body[len("def "):]
            if "=" not in rest:
                raise ParseError(slineno, scol, "def wants 'def f[A](ATOM) = term'")
            head, rhs = (s.strip() for s in rest.split("=", 1))
            atom = _parse_def_head(slineno, scol, head, name)
            term = _parse_term_at(slineno, rhs, scol + body.index("=") + 1)
            defs.append((atom, term))
        else:
            raise ParseError(slineno, scol, "agent lines start with 'sees' or 'def'")


def _parse_def_head(lineno, col, head, agent) -> str:
    # shape: f[AGENT](ATOM), with AGENT matching the enclosing block
    t = _parse_term_at(lineno, head, col)
    if not (isinstance(t, T.App) and isinstance(t.arg, T.Atom)):
        raise ParseError(lineno, col, "def head must look like f[A](ATOM)")
    if t.agent != agent:
        raise ParseError(lineno, col, f"def head names agent {t.agent!r} inside block {agent!r}")
    return t.arg.name


def _parse_action_block(lines, lineno, col, name) -> ActionDecl:
    communication = False
    updates, appears, kernel = [], [], []
    while True:
        item = lines.next_significant()
        if item is None:
            raise ParseError(lineno, col, f"action block {name!r} not closed with 'end'")
        slineno, body, scol = item
        if body == "end":
            return ActionDecl(name, communication, tuple(updates), tuple(appears), tuple(kernel))
        if body == "communication":
            communication = True
        elif body.startswith("update "):
            gen, rhs, rhs_col = _split_arrow(slineno, body[len("update "):], scol + 7)
            updates.append((gen, _parse_term_at(slineno, rhs, rhs_col)))
        elif body.startswith("appears "):
            agent, target, _ = _split_arrow(slineno, body[len("appears "):], scol + 8)
            if not agent.isidentifier() or not target.isidentifier():
                raise ParseError(slineno, scol, "appears wants 'appears AGENT -> ACTION'")
            appears.append((agent, target))
        elif body.startswith("kernel"):
            kernel.extend(body.split()[1:])
        else:
            raise ParseError(
                slineno, scol,
                "action lines: communication / update / appears / kernel",
            )


def _parse_query(lineno, body, col) -> Query:
    words = body.split()
    if len(words) < 3:
        raise ParseError(lineno, col, "query wants 'query ID KIND ...'")
    qid, kind = words[1], words[2]
    if kind not in QUERY_KINDS:
        raise ParseError(lineno, col, f"unknown query kind {kind!r}")
    rest = body.split(None, 2)[2][len(kind):].strip()
    rest_col = col + body.index(kind) + len(kind) + 1

    if kind == "validate-axioms":
        if rest:
            raise ParseError(lineno, rest_col, "validate-axioms takes no arguments")
        return Query(qid, kind)
    if kind == "evaluate":
        term = _parse_term_at(lineno, rest, rest_col)
        return Query(qid, kind, lhs=term)

    expect, depth = "holds", None
    if kind == "check":
        parts = rest.rsplit(" expect ", 1)
        if len(parts) == 2:
            rest, expect = parts[0].strip(), parts[1].strip()
            if expect not in ("holds", "fails"):
                raise ParseError(lineno, rest_col, "expect wants holds or fails")
    if kind == "prove":
        parts = rest.rsplit(" depth ", 1)
        if len(parts) == 2 and parts[1].strip().isdigit():
            rest, depth = parts[0].strip(), int(parts[1].strip())

    p = _TermParser(rest, line=lineno, column_offset=rest_col - 1)
    seq = p.parse_entailment()
    p.finish()
    return Query(qid, kind, lhs=seq.lhs, rhs=seq.rhs, expect=expect, depth=depth)


# -- cross-reference resolution ----------------------------------------------


def _term_names(t: Term):
    """Yield (kind, name) for every agent, action and atom reference."""
    if isinstance(t, T.Atom):
        yield ("atom", t.name)
    elif isinstance(t, (T.App, T.Info, T.Know, T.Believe)):
        yield ("agent", t.agent)
        yield from _term_names(t.arg)
    elif isinstance(t, T.CK):
        for a in t.agents:
            yield ("agent", a)
        yield from _term_names(t.arg)
    elif isinstance(t, (T.Upd, T.After)):
        yield from _action_names(t.action)
        yield from _term_names(t.arg)
    else:
        for k in T.children(t):
            yield from _term_names(k)


def _action_names(ref):
    if isinstance(ref, T.ActName):
        yield ("action", ref.name)
    else:
        yield ("agent", ref.agent)
        yield from _action_names(ref.ref)


def _resolve(doc: ScenarioDoc):
    carrier = set(doc.worlds) | set(doc.poset_elements)
    prop_names = set()
    for pname, term in doc.props:
        if pname in carrier or pname in prop_names:
            raise ResolutionError(f"proposition {pname!r} collides with another name")
        for kind, n in _term_names(term):
            if kind != "atom":
                raise ResolutionError(f"prop {pname!r} must be a ground term, found a {kind}")
            if n not in carrier and n not in prop_names:
                raise ResolutionError(f"prop {pname!r} references undeclared name {n!r}")
        prop_names.add(pname)

    agent_names = set()
    for a in doc.agents:
        if a.name in agent_names:
            raise ResolutionError(f"duplicate agent {a.name!r}")
        agent_names.add(a.name)
    action_names = set()
    for act in doc.actions:
        if act.name in action_names:
            raise ResolutionError(f"duplicate action {act.name!r}")
        action_names.add(act.name)

    atoms = carrier | prop_names

    def check_term(term, where, *, ground=False):
        for kind, n in _term_names(term):
            pool = {"atom": atoms, "agent": agent_names, "action": action_names}[kind]
            if n not in pool:
                raise ResolutionError(f"{where} references undeclared {kind} {n!r}")
            if ground and kind != "atom":
                raise ResolutionError(f"{where} must be a ground term")

    for a in doc.agents:
        for gen, term in a.sees:
            if gen not in carrier:
                raise ResolutionError(
                    f"agent {a.name!r} sees undeclared element {gen!r}"
                )
            check_term(term, f"agent {a.name!r} appearance", ground=True)
        for atom, term in a.defs:
            if atom not in atoms:
                raise ResolutionError(f"agent {a.name!r} defines f on undeclared atom {atom!r}")
            check_term(term, f"agent {a.name!r} definition")

    for act in doc.actions:
        for gen, term in act.updates:
            if gen not in carrier:
                raise ResolutionError(f"action {act.name!r} updates undeclared element {gen!r}")
            check_term(term, f"action {act.name!r} update", ground=True)
        for agent, target in act.appears:
            if agent not in agent_names:
                raise ResolutionError(f"action {act.name!r} appears to undeclared agent {agent!r}")
            if target not in action_names:
                raise ResolutionError(f"action {act.name!r} appears as undeclared action {target!r}")
        for atom in act.kernel:
            if atom not in atoms:
                raise ResolutionError(f"kernel of {act.name!r} names undeclared atom {atom!r}")

    for f in doc.facts:
        if f not in atoms:
            raise ResolutionError(f"facts name undeclared atom {f!r}")

    seen_q = set()
    for q in doc.queries:
        if q.id in seen_q:
            raise ResolutionError(f"duplicate query id {q.id!r}")
        seen_q.add(q.id)
        if q.kind == "check" and doc.mode == "symbolic":
            raise ResolutionError(f"query {q.id!r}: check needs a semantic scenario")
        if q.kind == "prove" and doc.mode == "semantic":
            raise ResolutionError(f"query {q.id!r}: prove needs a symbolic scenario")
        for term in (q.lhs, q.rhs):
            if term is not None:
                check_term(term, f"query {q.id!r}")


# -- serialization ------------------------------------------------------------


def serialize(doc: ScenarioDoc) -> str:
    """Canonical text; parse(serialize(doc)) is structurally equal to doc."""
    out = ["version 1", f"scenario {doc.name}"]
    if doc.description is not None:
        out.append(f'description "{doc.description}"')
    out.append(f"mode {doc.mode}")
    out.append("")
    if doc.worlds:
        out.append("worlds " + " ".join(doc.worlds))
    else:
        out.append("poset")
        edged = {n for e in doc.poset_edges for n in e}
        for n in doc.poset_elements:
            if n not in edged:
                out.append(f"  {n}")
        for a, b in doc.poset_edges:
            out.append(f"  {a} < {b}")
        out.append("end")
    for pname, term in doc.props:
        out.append(f"prop {pname} = {render_term(term)}")
    for a in doc.agents:
        out.append("")
        out.append(f"agent {a.name}")
        for gen, term in a.sees:
            out.append(f"  sees {gen} -> {render_term(term)}")
        for atom, term in a.defs:
            out.append(f"  def f[{a.name}]({atom}) = {render_term(term)}")
        out.append("end")
    for act in doc.actions:
        out.append("")
        out.append(f"action {act.name}")
        if act.communication:
            out.append("  communication")
        for gen, term in act.updates:
            out.append(f"  update {gen} -> {render_term(term)}")
        for agent, target in act.appears:
            out.append(f"  appears {agent} -> {target}")
        if act.kernel:
            out.append("  kernel " + " ".join(act.kernel))
        out.append("end")
    if doc.facts:
        out.append("")
        out.append("facts " + " ".join(doc.facts))
    if doc.queries:
        out.append("")
    for q in doc.queries:
        if q.kind == "validate-axioms":
            out.append(f"query {q.id} validate-axioms")
        elif q.kind == "evaluate":
            out.append(f"query {q.id} evaluate {render_term(q.lhs)}")
        else:
            line = f"query {q.id} {q.kind} {render_term(q.lhs)} |= {render_term(q.rhs)}"
            if q.kind == "check" and q.expect != "holds":
                line += " expect fails"
            if q.kind == "prove" and q.depth is not None:
                line += f" depth {q.depth}"
            out.append(line)
    return "\n".join(out) + "\n"


# -- instantiation --------------------------------------------------------------


@dataclass(frozen=True)
class Instantiated:
    doc: ScenarioDoc
    model: SemanticModel | None
    assumptions: Assumptions | None
    realization_warnings: tuple[str, ...] = ()

    @property
    def queries(self):
        return self.doc.queries


def _build_lattice(doc: ScenarioDoc):
    if doc.worlds:
        return lattice_mod.powerset_lattice(doc.worlds)
    return lattice_mod.build_from_order(doc.poset_elements, doc.poset_edges)


def _ground_env(doc: ScenarioDoc, lat):
    env: dict[str, object] = {}
    if doc.worlds:
        for w in doc.worlds:
            env[w] = lat.subset([w])
    else:
        for n in doc.poset_elements:
            env[n] = lat.element(n)
    return env


def _eval_ground(term: Term, env, lat):
    if isinstance(term, T.Atom):
        return env[term.name]
    if isinstance(term, T.Bot):
        return lat.bottom
    if isinstance(term, T.Top):
        return lat.top
    if isinstance(term, T.Or):
        return lat.join2(_eval_ground(term.left, env, lat), _eval_ground(term.right, env, lat))
    if isinstance(term, T.And):
        return lat.meet2(_eval_ground(term.left, env, lat), _eval_ground(term.right, env, lat))
    if isinstance(term, T.Not):
        return lat.complement(_eval_ground(term.arg, env, lat))
    raise ResolutionError(f"not a ground term: {render_term(term)}")


def instantiate(doc: ScenarioDoc, *, full_lattice_axioms: bool = False) -> Instantiated:
    """Build the semantic model and/or the assumption set a document declares.

    In 'both' mode symbolic declarations are checked against the model:
    kernel and fact declarations must be realized (they are axioms), while
    unrealized appearance definitions are reported as warnings, since they
    are hypotheses of the derivation engine rather than model constraints.
    """
    model = None
    assumptions = None
    warnings: list[str] = []

    if doc.mode in ("semantic", "both"):
        lat = _build_lattice(doc)
        env = _ground_env(doc, lat)
        for pname, term in doc.props:
            env[pname] = _eval_ground(term, env, lat)

        def generator_map(pairs):
            # generator labels are worlds (powerset) or poset elements; the
            # map builder validates that they cover the join-irreducibles
            gens = {}
            for gen, term in pairs:
                el = lat.subset([gen]) if doc.worlds else lat.element(gen)
                gens[el] = _eval_ground(term, env, lat)
            return gens

        mama_assignments = {a.name: generator_map(a.sees) for a in doc.agents}
        try:
            mama = epistemic.build_mama(lat, mama_assignments)
        except MissingGenerator as exc:
            raise MissingGenerator(f"scenario {doc.name!r}: {exc}") from exc

        labels = [dynamics.ActionLabel(act.name, act.communication) for act in doc.actions]
        updates = {act.name: generator_map(act.updates) for act in doc.actions}
        appearance: dict[str, dict[str, str]] = {a.name: {} for a in doc.agents}
        for act in doc.actions:
            for agent, target in act.appears:
                appearance[agent][act.name] = target
        fact_elems = tuple(env[f] for f in doc.facts)
        declared_kernels = {
            act.name: tuple(env[x] for x in act.kernel) for act in doc.actions if act.kernel
        }
        alg = dynamics.build_dynamic_algebra(
            mama, labels, updates, appearance, fact_elems, declared_kernels,
            full_lattice_axioms=full_lattice_axioms,
        )
        atoms = {pname: env[pname] for pname, _ in doc.props}
        for w in doc.worlds:
            atoms[w] = env[w]
        for n in doc.poset_elements:
            atoms[n] = env[n]
        model = SemanticModel(alg, atoms)

        for act in doc.actions:
            report = alg.kernel(act.name)
            if not report.matches:
                missed = ", ".join(e.name for e in report.undeclared_misses)
                raise KernelMismatch(
                    f"action {act.name!r}: declared kernel atoms not annihilated: {missed}"
                )

    if doc.mode in ("symbolic", "both"):
        defs = {}
        for a in doc.agents:
            for atom, term in a.defs:
                key = (a.name, atom)
                if key in defs:
                    raise ResolutionError(
                        f"duplicate definition of f[{a.name}]({atom})"
                    )
                defs[key] = term
        act_app = {}
        kernels = {}
        for act in doc.actions:
            for agent, target in act.appears:
                act_app[(agent, act.name)] = target
            if act.kernel:
                kernels[act.name] = frozenset(act.kernel)
        # actions with no explicit appearance default to themselves
        for act in doc.actions:
            for a in doc.agents:
                act_app.setdefault((a.name, act.name), act.name)
        assumptions = Assumptions(
            appearance_defs=defs,
            action_appearance=act_app,
            kernels=kernels,
            facts=frozenset(doc.facts),
            communication=frozenset(a.name for a in doc.actions if a.communication),
            agents=frozenset(a.name for a in doc.agents),
            actions=frozenset(a.name for a in doc.actions),
            atoms=frozenset(n for n, _ in doc.props)
            | frozenset(doc.worlds)
            | frozenset(doc.poset_elements),
        )

    if model is not None and assumptions is not None:
        for (agent, atom), term in assumptions.appearance_defs.items():
            declared = eval_term(model, T.App(agent, T.Atom(atom)))
            defined = eval_term(model, term)
            if declared != defined:
                warnings.append(
                    f"definition f[{agent}]({atom}) = {render_term(term)} is not realized: "
                    f"model value {declared.name}, declared {defined.name}"
                )

    return Instantiated(doc, model, assumptions, tuple(warnings))

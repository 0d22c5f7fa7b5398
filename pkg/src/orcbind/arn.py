"""Asynchronous relational networks.

A network is an edge-bipartite hypergraph: points labelled with ports,
computation hyperedges labelled with processes, communication hyperedges
labelled with connections.  The behaviour a ground network exhibits at a
point is the reduct, to that point's actions, of the product of the cofree
expansions of every hyperedge automaton in the point's dependency
subnetwork.

Constructors only normalize shapes; all well-formedness conditions are
reported by :func:`validate` so that hand-written network files can be
checked rather than rejected mid-parse.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import ltl
from .engine import OrchestrationScheme
from .muller import LassoTrace, MullerAutomaton, guard_mask, product, reduct, cofree_expansion
from .sigcat import (
    ActionSignature,
    Cocone,
    FiniteDiagram,
    PartialSignatureMorphism,
    SignatureMorphism,
    colimit,
)

# ---------------------------------------------------------------------------
# Ports, processes, connections


@dataclass(frozen=True)
class Port:
    """Disjoint sets of published and delivered messages."""

    published: frozenset[str]
    delivered: frozenset[str]

    def __post_init__(self):
        object.__setattr__(self, "published", frozenset(self.published))
        object.__setattr__(self, "delivered", frozenset(self.delivered))

    @property
    def messages(self) -> frozenset[str]:
        return self.published | self.delivered

    def actions(self) -> ActionSignature:
        return ActionSignature(
            frozenset(f"{m}!" for m in self.published)
            | frozenset(f"{m}?" for m in self.delivered)
        )

    def polarity_of(self, msg: str) -> str:
        if msg in self.published:
            return "!"
        if msg in self.delivered:
            return "?"
        raise KeyError(msg)

    def action_of(self, msg: str) -> str:
        return msg + self.polarity_of(msg)


def qualified_signature(ports: dict[str, Port]) -> ActionSignature:
    """Coproduct of point-port signatures with point-qualified action names ``x.m!``."""
    actions = set()
    for x, port in ports.items():
        for m in port.published:
            actions.add(f"{x}.{m}!")
        for m in port.delivered:
            actions.add(f"{x}.{m}?")
    return ActionSignature(frozenset(actions))


def point_injection(x: str, port: Port, target: ActionSignature) -> SignatureMorphism:
    """Port actions into a qualified signature: ``m!`` to ``x.m!``."""
    mapping = {a: f"{x}.{a}" for a in port.actions().actions}
    return SignatureMorphism.make(port.actions(), target, mapping)


@dataclass(frozen=True)
class Process:
    """Interaction points labelled with ports, plus a behaviour automaton over
    the point-qualified coproduct of the port actions."""

    points: frozenset[str]
    ports: tuple[tuple[str, Port], ...]
    automaton: MullerAutomaton

    def __post_init__(self):
        object.__setattr__(self, "points", frozenset(self.points))
        object.__setattr__(self, "ports", tuple(sorted(dict(self.ports).items())))

    @classmethod
    def make(cls, ports: dict[str, Port], automaton: MullerAutomaton) -> "Process":
        return cls(frozenset(ports), tuple(ports.items()), automaton)

    @property
    def port_of(self) -> dict[str, Port]:
        return dict(self.ports)

    def signature(self) -> ActionSignature:
        return qualified_signature(self.port_of)


@dataclass(frozen=True)
class Connection:
    """A channel (message set plus automaton over ``m!``/``m?``) attached to
    ports through partial injections from channel messages to port messages."""

    messages: frozenset[str]
    automaton: MullerAutomaton
    attachments: tuple[tuple[str, tuple[tuple[str, str], ...]], ...]

    def __post_init__(self):
        object.__setattr__(self, "messages", frozenset(self.messages))
        object.__setattr__(
            self,
            "attachments",
            tuple(sorted((x, tuple(sorted(dict(mu).items()))) for x, mu in dict(self.attachments).items())),
        )

    @classmethod
    def make(cls, messages, automaton, attachments: dict[str, dict[str, str]]) -> "Connection":
        return cls(
            frozenset(messages),
            automaton,
            tuple((x, tuple(mu.items())) for x, mu in attachments.items()),
        )

    def signature(self) -> ActionSignature:
        return ActionSignature(
            frozenset(f"{m}!" for m in self.messages) | frozenset(f"{m}?" for m in self.messages)
        )

    @property
    def attachment_of(self) -> dict[str, dict[str, str]]:
        return {x: dict(mu) for x, mu in self.attachments}

    def action_attachment(self, x: str, port: Port) -> PartialSignatureMorphism:
        """Partial translation of channel actions into the port's actions:
        ``m!`` maps when the image is published there, ``m?`` when delivered."""
        mu = self.attachment_of.get(x, {})
        mapping = {}
        for m, pm in mu.items():
            if pm in port.published:
                mapping[f"{m}!"] = f"{pm}!"
            elif pm in port.delivered:
                mapping[f"{m}?"] = f"{pm}?"
        return PartialSignatureMorphism.make(self.signature(), port.actions(), mapping)


# ---------------------------------------------------------------------------
# Networks


@dataclass(frozen=True)
class Arn:
    points: frozenset[str]
    ports: tuple[tuple[str, Port], ...]
    processes: tuple[tuple[str, Process], ...]
    connections: tuple[tuple[str, Connection], ...]
    incidence: tuple[tuple[str, frozenset[str]], ...]

    def __post_init__(self):
        object.__setattr__(self, "points", frozenset(self.points))
        object.__setattr__(self, "ports", tuple(sorted(dict(self.ports).items())))
        object.__setattr__(self, "processes", tuple(sorted(dict(self.processes).items())))
        object.__setattr__(self, "connections", tuple(sorted(dict(self.connections).items())))
        object.__setattr__(
            self,
            "incidence",
            tuple(sorted((e, frozenset(xs)) for e, xs in dict(self.incidence).items())),
        )

    @classmethod
    def make(cls, ports, processes, connections, incidence) -> "Arn":
        return cls(
            frozenset(ports),
            tuple(ports.items()),
            tuple(processes.items()),
            tuple(connections.items()),
            tuple((e, frozenset(xs)) for e, xs in incidence.items()),
        )

    @property
    def port_of(self) -> dict[str, Port]:
        return dict(self.ports)

    @property
    def process_of(self) -> dict[str, Process]:
        return dict(self.processes)

    @property
    def connection_of(self) -> dict[str, Connection]:
        return dict(self.connections)

    @property
    def incidence_of(self) -> dict[str, frozenset[str]]:
        return dict(self.incidence)

    def edges(self) -> dict[str, frozenset[str]]:
        return self.incidence_of

    def edges_at(self, x: str) -> list[str]:
        return sorted(e for e, xs in self.incidence if x in xs)

    def is_process_edge(self, e: str) -> bool:
        return e in self.process_of


@dataclass(frozen=True)
class ArnSpec:
    """A temporal sentence placed at a point, over that point's port actions."""

    point: str
    formula: ltl.LtlFormula

    def render(self) -> str:
        return f"<{self.point} : {ltl.render_formula(self.formula)}>"


def validate(n: Arn) -> tuple[str, ...]:
    """Every violated well-formedness condition, with its location."""
    issues = []
    ports = n.port_of
    procs = n.process_of
    conns = n.connection_of
    inc = n.incidence_of

    if set(ports) != set(n.points):
        issues.append("ports: every point must carry exactly one port")
    for x, port in sorted(ports.items()):
        overlap = port.published & port.delivered
        if overlap:
            issues.append(f"port {x}: published/delivered overlap on {sorted(overlap)}")

    edge_names = set(procs) | set(conns)
    if set(inc) != edge_names:
        issues.append("incidence: edge names must be exactly the processes and connections")
    if set(procs) & set(conns):
        issues.append("edges: process and connection names must be disjoint")

    for e, xs in sorted(inc.items()):
        if not xs:
            issues.append(f"edge {e}: incidence set is empty")
        stray = xs - n.points
        if stray:
            issues.append(f"edge {e}: incident with unknown points {sorted(stray)}")

    for e1, e2 in itertools.combinations(sorted(inc), 2):
        if inc[e1] & inc[e2]:
            both_proc = e1 in procs and e2 in procs
            both_conn = e1 in conns and e2 in conns
            if both_proc or both_conn:
                issues.append(f"edges {e1}, {e2}: adjacent hyperedges of the same kind")

    covered = set()
    for xs in inc.values():
        covered |= xs
    for x in sorted(n.points - covered):
        issues.append(f"point {x}: incident with no hyperedge")

    for p, proc in sorted(procs.items()):
        xs = inc.get(p, frozenset())
        if proc.points != xs:
            issues.append(f"process {p}: labelled points {sorted(proc.points)} differ from incidence {sorted(xs)}")
        for x in sorted(proc.points & set(ports)):
            if proc.port_of.get(x) != ports[x]:
                issues.append(f"process {p}: port label at {x} differs from the network's")
        if proc.automaton.signature != proc.signature():
            issues.append(f"process {p}: automaton signature is not the coproduct of its port actions")

    for c, conn in sorted(conns.items()):
        xs = inc.get(c, frozenset())
        att = conn.attachment_of
        stray = set(att) - xs
        if stray:
            issues.append(f"connection {c}: attachments at non-incident points {sorted(stray)}")
        if conn.automaton.signature != conn.signature():
            issues.append(f"connection {c}: channel automaton signature must be the message actions")
        seen_domains = {}
        for x in sorted(xs):
            mu = att.get(x, {})
            extra = set(mu) - conn.messages
            if extra:
                issues.append(f"connection {c} at {x}: attachment domain outside channel messages {sorted(extra)}")
            if len(set(mu.values())) != len(mu):
                issues.append(f"connection {c} at {x}: attachment is not injective")
            if x in ports:
                bad = [pm for pm in mu.values() if pm not in ports[x].messages]
                if bad:
                    issues.append(f"connection {c} at {x}: attachment image outside the port {sorted(bad)}")
            seen_domains[x] = set(mu)
        coverage = set().union(*seen_domains.values()) if seen_domains else set()
        if coverage != set(conn.messages):
            missing = sorted(set(conn.messages) - coverage)
            issues.append(f"connection {c}: messages not covered by any attachment {missing}")
        # well-pairing: a message published at x must be delivered at some y != x,
        # and vice versa
        for x in sorted(xs):
            if x not in ports:
                continue
            mu = att.get(x, {})
            for m, pm in sorted(mu.items()):
                if pm not in ports[x].messages:
                    continue
                want = "delivered" if pm in ports[x].published else "published"
                paired = any(
                    y != x
                    and m in att.get(y, {})
                    and y in ports
                    and att[y][m] in (ports[y].delivered if want == "delivered" else ports[y].published)
                    for y in xs
                )
                if not paired:
                    issues.append(
                        f"connection {c}: message {m} at {x} has no {want} counterpart at another point"
                    )
        if len(xs) == 2:
            for x in sorted(xs):
                if set(att.get(x, {})) != set(conn.messages):
                    issues.append(f"connection {c}: binary connection attachment at {x} must be total")

    return tuple(issues)


def require_valid(n: Arn) -> None:
    issues = validate(n)
    if issues:
        raise ValueError("invalid network: " + "; ".join(issues))


def classify_points(n: Arn):
    """Partition into (requires, provides, internal) points.

    Points incident only with communication edges are requires-points, only
    with computation edges provides-points, with both internal.  Isolated
    points (rejected by the validator, but classifiable) count as internal.
    """
    requires, provides, internal = set(), set(), set()
    procs = n.process_of
    for x in n.points:
        kinds = {("P" if e in procs else "C") for e in n.edges_at(x)}
        if kinds == {"C"}:
            requires.add(x)
        elif kinds == {"P"}:
            provides.add(x)
        else:
            internal.add(x)
    return frozenset(requires), frozenset(provides), frozenset(internal)


def is_ground(n: Arn) -> bool:
    requires, _, _ = classify_points(n)
    return not requires


def subnet_at(n: Arn, x: str) -> Arn:
    """The full sub-network induced by x and the points x depends on.

    Dependency follows paths that begin with a computation hyperedge; the
    induced sub-network keeps every hyperedge all of whose points survive.
    """
    if x not in n.points:
        raise KeyError(x)
    inc = n.incidence_of
    procs = n.process_of
    reached = {x}
    frontier = [x]
    first = True
    while frontier:
        next_frontier = []
        for y in frontier:
            for e in n.edges_at(y):
                if first and e not in procs:
                    continue
                for z in inc[e]:
                    if z not in reached:
                        reached.add(z)
                        next_frontier.append(z)
        frontier = next_frontier
        first = False
    keep_edges = {e for e, xs in inc.items() if xs <= reached}
    return Arn.make(
        {y: n.port_of[y] for y in reached},
        {p: proc for p, proc in n.process_of.items() if p in keep_edges},
        {c: conn for c, conn in n.connection_of.items() if c in keep_edges},
        {e: inc[e] for e in keep_edges},
    )


# ---------------------------------------------------------------------------
# Signature of a network and observed behaviour

_PT, _EDGE, _SPAN = "pt:", "e:", "sp:"


def diagram_of(n: Arn) -> FiniteDiagram:
    """Nodes for points, hyperedges and attachment spans; arrows inject port
    actions into process signatures and relate spans to channels and ports."""
    nodes = {}
    arrows = {}
    ports = n.port_of
    for x in sorted(n.points):
        nodes[_PT + x] = ports[x].actions()
    for p, proc in n.processes:
        pid = _EDGE + p
        nodes[pid] = proc.signature()
        for x in sorted(proc.points):
            arrows[(_PT + x, pid)] = point_injection(x, ports[x], nodes[pid])
    for c, conn in n.connections:
        cid = _EDGE + c
        nodes[cid] = conn.signature()
        for x in sorted(n.incidence_of.get(c, frozenset())):
            sid = f"{_SPAN}{c}:{x}"
            att = conn.action_attachment(x, ports[x])
            dom_sig = ActionSignature(att.domain)
            nodes[sid] = dom_sig
            arrows[(sid, cid)] = SignatureMorphism.make(
                dom_sig, nodes[cid], {a: a for a in att.domain}
            )
            arrows[(sid, _PT + x)] = SignatureMorphism.make(
                dom_sig, nodes[_PT + x], att.mapping
            )
    return FiniteDiagram.make(nodes, arrows)


def signature_of(n: Arn) -> Cocone:
    """The colimiting cocone over the network's diagram."""
    return colimit(diagram_of(n))


def observed_automaton(n: Arn, x: str) -> MullerAutomaton:
    """Behaviour of a ground network at one of its points.

    Product of the cofree expansions of every hyperedge automaton of the
    dependency subnetwork, reducted to the point's own actions.  Hyperedges
    enter the product in name order, so reconstruction is deterministic; the
    result is canonical only up to isomorphism, so callers compare
    semantically.
    """
    require_valid(n)
    if not is_ground(n):
        raise ValueError("observed behaviour is defined only for ground networks")
    sub = subnet_at(n, x)
    cocone = signature_of(sub)
    parts = []
    for e in sorted(set(sub.process_of) | set(sub.connection_of)):
        aut = sub.process_of[e].automaton if e in sub.process_of else sub.connection_of[e].automaton
        parts.append(cofree_expansion(aut, cocone.leg(_EDGE + e)))
    joint = product(parts, signature=cocone.apex)
    return reduct(joint, cocone.leg(_PT + x))


def is_property(n: Arn, spec: ArnSpec) -> bool:
    """Does the observed automaton at the spec's point satisfy its formula?"""
    port = n.port_of.get(spec.point)
    if port is None:
        raise KeyError(spec.point)
    stray = ltl.atoms_of(spec.formula) - port.actions().actions
    if stray:
        raise ValueError(f"spec formula uses actions outside the port at {spec.point}: {sorted(stray)}")
    return ltl.holds(observed_automaton(n, spec.point), spec.formula)


# ---------------------------------------------------------------------------
# Morphisms


@dataclass(frozen=True)
class ArnMorphism:
    """An injective hypergraph homomorphism with per-point polarity-preserving
    message injections; labels are preserved as dictated by edge kinds."""

    source: Arn
    target: Arn
    point_pairs: tuple[tuple[str, str], ...]
    edge_pairs: tuple[tuple[str, str], ...]
    msg_pairs: tuple[tuple[str, tuple[tuple[str, str], ...]], ...]

    @classmethod
    def make(cls, source, target, point_map, edge_map, msg_maps) -> "ArnMorphism":
        return cls(
            source,
            target,
            tuple(sorted(point_map.items())),
            tuple(sorted(edge_map.items())),
            tuple(sorted((x, tuple(sorted(m.items()))) for x, m in msg_maps.items())),
        )

    @property
    def point_map(self) -> dict[str, str]:
        return dict(self.point_pairs)

    @property
    def edge_map(self) -> dict[str, str]:
        return dict(self.edge_pairs)

    @property
    def msg_map(self) -> dict[str, dict[str, str]]:
        return {x: dict(m) for x, m in self.msg_pairs}

    def action_morphism(self, x: str) -> SignatureMorphism:
        """Port-action morphism at a source point: ``m!`` to ``theta(m)!``."""
        port1 = self.source.port_of[x]
        port2 = self.target.port_of[self.point_map[x]]
        mu = self.msg_map[x]
        mapping = {}
        for m in port1.published:
            mapping[f"{m}!"] = f"{mu[m]}!"
        for m in port1.delivered:
            mapping[f"{m}?"] = f"{mu[m]}?"
        return SignatureMorphism.make(port1.actions(), port2.actions(), mapping)


def identity_morphism(n: Arn) -> ArnMorphism:
    return ArnMorphism.make(
        n,
        n,
        {x: x for x in n.points},
        {e: e for e in n.incidence_of},
        {x: {m: m for m in n.port_of[x].messages} for x in n.points},
    )


def compose_morphisms(t1: ArnMorphism, t2: ArnMorphism) -> ArnMorphism:
    if t1.target != t2.source:
        raise ValueError("endpoint mismatch in morphism composition")
    pm1, pm2 = t1.point_map, t2.point_map
    em1, em2 = t1.edge_map, t2.edge_map
    mm1, mm2 = t1.msg_map, t2.msg_map
    return ArnMorphism.make(
        t1.source,
        t2.target,
        {x: pm2[y] for x, y in pm1.items()},
        {e: em2[f] for e, f in em1.items()},
        {x: {m: mm2[pm1[x]][v] for m, v in mu.items()} for x, mu in mm1.items()},
    )


def automata_equal(a1: MullerAutomaton, a2: MullerAutomaton) -> bool:
    """On-the-nose equality with semantic guard comparison."""
    return (
        a1.signature == a2.signature
        and a1.states == a2.states
        and a1.initial == a2.initial
        and a1.final == a2.final
        and a1.edge_masks() == a2.edge_masks()
    )


def check_morphism(theta: ArnMorphism) -> tuple[str, ...]:
    """Every violated morphism condition, with its location."""
    issues = []
    n1, n2 = theta.source, theta.target
    pm, em, mm = theta.point_map, theta.edge_map, theta.msg_map
    inc1, inc2 = n1.incidence_of, n2.incidence_of

    if set(pm) != set(n1.points):
        issues.append("point map must be total on the source points")
    if set(em) != set(inc1):
        issues.append("edge map must be total on the source hyperedges")
    if any(y not in n2.points for y in pm.values()):
        issues.append("point map image outside target points")
    if any(f not in inc2 for f in em.values()):
        issues.append("edge map image outside target hyperedges")
    if issues:
        return tuple(issues)

    if len(set(pm.values())) != len(pm):
        issues.append("point map is not injective")
    if len(set(em.values())) != len(em):
        issues.append("edge map is not injective")

    procs1, procs2 = n1.process_of, n2.process_of
    conns1, conns2 = n1.connection_of, n2.connection_of
    for p in sorted(procs1):
        if em[p] not in procs2:
            issues.append(f"edge {p}: computation hyperedge mapped to a non-process edge")
    for c in sorted(conns1):
        if em[c] not in conns2:
            issues.append(f"edge {c}: communication hyperedge mapped to a non-connection edge")

    for e, xs in sorted(inc1.items()):
        image = frozenset(pm[x] for x in xs)
        if image != inc2[em[e]] & frozenset(pm.values()) or not image <= inc2[em[e]]:
            # homomorphism condition: x in gamma_e iff theta(x) in gamma_theta(e)
            for x in sorted(n1.points):
                if (x in xs) != (pm[x] in inc2[em[e]]):
                    issues.append(f"incidence not preserved at point {x}, edge {e}")

    comp_incident = {x for p in procs1 for x in inc1.get(p, frozenset())}
    for x in sorted(n1.points):
        port1 = n1.port_of[x]
        port2 = n2.port_of.get(pm[x])
        mu = mm.get(x)
        if mu is None or set(mu) != set(port1.messages):
            issues.append(f"point {x}: message injection must be total on the port messages")
            continue
        if len(set(mu.values())) != len(mu):
            issues.append(f"point {x}: message injection is not injective")
        if port2 is None:
            continue
        for m in sorted(port1.published):
            if mu[m] not in port2.published:
                issues.append(f"point {x}: published message {m} not mapped to a published message")
        for m in sorted(port1.delivered):
            if mu[m] not in port2.delivered:
                issues.append(f"point {x}: delivered message {m} not mapped to a delivered message")
        if x in comp_incident:
            if any(m != v for m, v in mu.items()):
                issues.append(f"point {x}: computation-incident point must carry the identity injection")

    for p, proc in sorted(procs1.items()):
        target_proc = procs2.get(em[p])
        if target_proc is None:
            continue
        if proc.points != target_proc.points or proc.ports != target_proc.ports:
            issues.append(f"process {p}: labels not preserved on the nose")
        elif not automata_equal(proc.automaton, target_proc.automaton):
            issues.append(f"process {p}: automaton not preserved on the nose")

    for c, conn in sorted(conns1.items()):
        target_conn = conns2.get(em[c])
        if target_conn is None:
            continue
        if conn.messages != target_conn.messages:
            issues.append(f"connection {c}: channel messages not preserved")
            continue
        if not automata_equal(conn.automaton, target_conn.automaton):
            issues.append(f"connection {c}: channel automaton not preserved")
        att1 = conn.attachment_of
        att2 = target_conn.attachment_of
        for x in sorted(inc1.get(c, frozenset())):
            mu1 = att1.get(x, {})
            mu2 = att2.get(pm[x], {})
            mux = mm.get(x, {})
            if set(mu1) != set(mu2):
                issues.append(f"connection {c} at {x}: attachment domains differ after mapping")
                continue
            for m in sorted(mu1):
                if mux.get(mu1[m]) != mu2[m]:
                    issues.append(f"connection {c} at {x}: attachment triangle does not commute on {m}")

    return tuple(issues)


def translate_spec(theta: ArnMorphism, spec: ArnSpec) -> ArnSpec:
    if spec.point not in theta.source.points:
        raise KeyError(spec.point)
    return ArnSpec(
        theta.point_map[spec.point],
        ltl.translate(spec.formula, theta.action_morphism(spec.point)),
    )


# ---------------------------------------------------------------------------
# Binding: gluing a clause network onto a query network


def _freshen(name: str, taken: set[str]) -> str:
    candidate = name
    i = 1
    while candidate in taken:
        candidate = f"{name}~{i}"
        i += 1
    return candidate


def rename_apart(clause_net: Arn, taken_points: set[str], taken_edges: set[str]):
    """A variant of a network whose requires-points and hyperedges avoid the
    given names, together with the variant morphism.

    Computation-incident points cannot be renamed (process labels pin them);
    a collision there returns None.
    """
    requires, _, _ = classify_points(clause_net)
    point_renames = {}
    for x in sorted(clause_net.points):
        if x in taken_points:
            if x not in requires:
                return None
            point_renames[x] = _freshen(x, taken_points | set(clause_net.points) | set(point_renames.values()))
    edge_renames = {}
    for e in sorted(clause_net.incidence_of):
        if e in taken_edges:
            edge_renames[e] = _freshen(
                e, taken_edges | set(clause_net.incidence_of) | set(edge_renames.values())
            )
    if not point_renames and not edge_renames:
        return clause_net, identity_morphism(clause_net)

    rp = lambda x: point_renames.get(x, x)
    re_ = lambda e: edge_renames.get(e, e)
    new_connections = {}
    for c, conn in clause_net.connection_of.items():
        new_connections[re_(c)] = Connection.make(
            conn.messages,
            conn.automaton,
            {rp(x): mu for x, mu in conn.attachment_of.items()},
        )
    variant = Arn.make(
        {rp(x): port for x, port in clause_net.port_of.items()},
        {re_(p): proc for p, proc in clause_net.process_of.items()},
        new_connections,
        {re_(e): frozenset(rp(x) for x in xs) for e, xs in clause_net.incidence_of.items()},
    )
    theta = ArnMorphism.make(
        clause_net,
        variant,
        {x: rp(x) for x in clause_net.points},
        {e: re_(e) for e in clause_net.incidence_of},
        {x: {m: m for m in clause_net.port_of[x].messages} for x in clause_net.points},
    )
    return variant, theta


def glue(query_net: Arn, x1: str, clause_net: Arn, x2: str, corr: dict[str, str]):
    """Fuse a requires-point of the query with a provides-point of the clause.

    `corr` maps the messages of the query port injectively and
    polarity-preservingly into the clause port's messages.  Returns
    (glued, theta1, theta2) or None when no well-formed gluing exists.
    """
    q_requires, _, _ = classify_points(query_net)
    _, c_provides, _ = classify_points(clause_net)
    if x1 not in q_requires or x2 not in c_provides:
        return None
    port1 = query_net.port_of[x1]
    if set(corr) != set(port1.messages):
        return None
    if len(set(corr.values())) != len(corr):
        return None

    remaining_points = set(query_net.points) - {x1}
    renamed = rename_apart(clause_net, remaining_points, set(query_net.incidence_of))
    if renamed is None:
        return None
    variant, variant_theta = renamed
    vx2 = variant_theta.point_map[x2]
    port2 = variant.port_of[vx2]
    for m in port1.published:
        if corr[m] not in port2.published:
            return None
    for m in port1.delivered:
        if corr[m] not in port2.delivered:
            return None
    if vx2 in remaining_points:
        return None

    subst = lambda x: vx2 if x == x1 else x
    new_connections = {}
    for c, conn in query_net.connection_of.items():
        att = conn.attachment_of
        if x1 in att:
            new_att = {subst(x): mu for x, mu in att.items() if x != x1}
            new_att[vx2] = {m: corr[pm] for m, pm in att[x1].items()}
            new_connections[c] = Connection.make(conn.messages, conn.automaton, new_att)
        else:
            new_connections[c] = conn
    new_connections.update(variant.connection_of)

    glued_ports = {subst(x): port for x, port in query_net.port_of.items() if x != x1}
    glued_ports.update(variant.port_of)
    glued = Arn.make(
        glued_ports,
        {**query_net.process_of, **variant.process_of},
        new_connections,
        {
            **{e: frozenset(subst(x) for x in xs) for e, xs in query_net.incidence_of.items()},
            **variant.incidence_of,
        },
    )
    if validate(glued):
        return None

    theta1 = ArnMorphism.make(
        query_net,
        glued,
        {x: subst(x) for x in query_net.points},
        {e: e for e in query_net.incidence_of},
        {
            x: (corr if x == x1 else {m: m for m in query_net.port_of[x].messages})
            for x in query_net.points
        },
    )
    theta2 = ArnMorphism.make(
        clause_net,
        glued,
        variant_theta.point_map,
        variant_theta.edge_map,
        variant_theta.msg_map,
    )
    return glued, theta1, theta2


def name_matching_correspondence(port1: Port, port2: Port) -> dict[str, str] | None:
    """Identity-on-names correspondence when it is total and polarity-preserving."""
    corr = {}
    for m in port1.published:
        if m not in port2.published:
            return None
        corr[m] = m
    for m in port1.delivered:
        if m not in port2.delivered:
            return None
        corr[m] = m
    return corr


# ---------------------------------------------------------------------------
# The scheme


class ArnScheme(OrchestrationScheme):
    """Networks as orchestrations; specs are temporal sentences at points."""

    def compose_morphisms(self, m1, m2):
        return compose_morphisms(m1, m2)

    def identity_morphism(self, orc):
        return identity_morphism(orc)

    def translate_spec(self, m, spec):
        return translate_spec(m, spec)

    def is_ground(self, orc):
        return is_ground(orc)

    def is_property(self, orc, spec):
        return is_property(orc, spec)

    def is_property_refuted(self, orc, spec):
        return not is_property(orc, spec)

    def spec_entails(self, orc, provided, required):
        if provided.point != required.point:
            return False
        sig = orc.port_of[provided.point].actions()
        return ltl.entails(provided.formula, required.formula, sig)

    def is_trivial(self, orc, spec):
        sig = orc.port_of[spec.point].actions()
        return ltl.valid(spec.formula, sig)

    def candidate_unifiers(self, q_orc, q_spec, c_orc, c_provides, hint):
        x1 = q_spec.point
        x2 = c_provides.point
        if x1 not in q_orc.points or x2 not in c_orc.points:
            return []
        corrs = []
        if hint is not None:
            corr = dict(hint.get("correspondence", {})) if isinstance(hint, dict) else dict(hint)
            if set(corr) == set(q_orc.port_of[x1].messages):
                corrs.append(corr)
        else:
            guess = name_matching_correspondence(q_orc.port_of[x1], c_orc.port_of[x2])
            if guess is not None:
                corrs.append(guess)
        out = []
        for corr in corrs:
            result = glue(q_orc, x1, c_orc, x2, corr)
            if result is not None:
                glued, theta1, theta2 = result
                out.append((theta1, theta2))
        return out

    def render_spec(self, spec):
        return spec.render()

    def render_orc(self, orc):
        return "net{" + ",".join(sorted(orc.points)) + "}"

    def render_morphism(self, m):
        moved_points = [f"{x}->{y}" for x, y in m.point_pairs if x != y]
        moved_msgs = []
        for x, pairs in m.msg_pairs:
            changed = [f"{a}->{b}" for a, b in pairs if a != b]
            if changed:
                moved_msgs.append(f"{x}[" + " ".join(changed) + "]")
        inside = "; ".join(filter(None, [" ".join(moved_points), " ".join(moved_msgs)]))
        return "{" + (inside if inside else "id") + "}"


# Convenience used by tests and examples: amalgamation-style cross-check of an
# observed automaton on sampled lassos.


def observed_accepts_via_components(n: Arn, x: str, trace: LassoTrace) -> bool:
    """Acceptance of a lasso at a point, decided through joint component traces.

    Searches for a joint lasso over the network apex that projects to the
    given one and is accepted by the product of expansions; used to
    cross-check `observed_automaton` on small networks.
    """
    from .muller import accepts as muller_accepts

    sub = subnet_at(n, x)
    cocone = signature_of(sub)
    parts = []
    for e in sorted(set(sub.process_of) | set(sub.connection_of)):
        aut = sub.process_of[e].automaton if e in sub.process_of else sub.connection_of[e].automaton
        parts.append(cofree_expansion(aut, cocone.leg(_EDGE + e)))
    joint = product(parts, signature=cocone.apex)
    leg = cocone.leg(_PT + x)
    projected = reduct(joint, leg)
    return muller_accepts(projected, trace)

"""Merging sibling shortcuts whose final words are semantically similar.

Candidates are selected nodes whose final (right-most) slot carries a plain
word literal and whose drop-final-word parent is still their live hierarchy
parent. Distances between candidates are cosine distances of the final-word
embeddings; everything else is infinitely far apart. Complete-linkage
clustering under a cut threshold groups them; each multi-member cluster is
replaced in the hierarchy by an aggregate node whose final slot matches the
member word set.
"""

from __future__ import annotations

import math
from copy import deepcopy
from dataclasses import dataclass

from .corpus import Dataset, EmbeddingTable
from .mining import MinedArtifact, ShortcutNode, passes_thresholds, stats_for_ids
from .templates import Slot, Template, canonical, template_id

DEFAULT_CUT = 0.75


@dataclass
class MergeGroup:
    member_ids: list[str]
    words: list[str]
    representative: str
    covered_ids: set[str]
    distances: list[list[float]]


def final_word(node: ShortcutNode) -> str | None:
    """The final slot's word literal; None for POS-only or word-set slots."""
    return node.template.final_slot.word


def merge_parent_template(node: ShortcutNode) -> Template | None:
    """The template with the final word dropped (the shared-parent candidate)."""
    if final_word(node) is None:
        return None
    last = len(node.template.slots) - 1
    return node.template.with_slot(last, node.template.final_slot.dropped())


def cosine_distance(a, b) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    return 1.0 - dot / (na * nb)


def mergeable(
    a: ShortcutNode, b: ShortcutNode, artifact: MinedArtifact, embeddings: EmbeddingTable
) -> bool:
    """Same live parent, same prediction label, identical structure up to the
    final word, and both final words embeddable."""
    if a.id == b.id:
        return False
    wa, wb = final_word(a), final_word(b)
    if wa is None or wb is None:
        return False
    if wa not in embeddings or wb not in embeddings:
        return False
    pa, pb = merge_parent_template(a), merge_parent_template(b)
    if pa != pb:
        return False
    parent_id = template_id(pa)
    if parent_id not in a.parent_ids or parent_id not in b.parent_ids:
        return False
    return a.whole.prediction_label == b.whole.prediction_label


def pair_distance(
    a: ShortcutNode, b: ShortcutNode, artifact: MinedArtifact, embeddings: EmbeddingTable
) -> float:
    """1 - cosine similarity of the final-word embeddings; +inf when not mergeable."""
    if not mergeable(a, b, artifact, embeddings):
        return math.inf
    return cosine_distance(embeddings.get(final_word(a)), embeddings.get(final_word(b)))


def complete_linkage(matrix: list[list[float]], cut: float) -> list[list[int]]:
    """Agglomerative complete-linkage clustering over a symmetric distance
    matrix; merging stops once the smallest inter-cluster linkage exceeds cut.
    Returns index clusters; every cluster's max pairwise distance is <= cut.
    """
    clusters = [[i] for i in range(len(matrix))]
    while len(clusters) > 1:
        best = math.inf
        best_pair = None
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                linkage = max(matrix[a][b] for a in clusters[i] for b in clusters[j])
                if linkage < best:
                    best = linkage
                    best_pair = (i, j)
        if best_pair is None or best > cut:
            break
        i, j = best_pair
        clusters[i] = sorted(clusters[i] + clusters[j])
        del clusters[j]
    return clusters


def complete_linkage_cluster(
    nodes: list[ShortcutNode],
    artifact: MinedArtifact,
    embeddings: EmbeddingTable,
    cut: float = DEFAULT_CUT,
) -> list[MergeGroup]:
    """Cluster a node list under pair_distance; singletons come back as
    one-member groups so callers see the full partition."""
    matrix = [
        [0.0 if i == j else pair_distance(nodes[i], nodes[j], artifact, embeddings) for j in range(len(nodes))]
        for i in range(len(nodes))
    ]
    groups = []
    for cluster in complete_linkage(matrix, cut):
        members = [nodes[i] for i in cluster]
        sub = [[matrix[a][b] for b in cluster] for a in cluster]
        words = [final_word(n) or "" for n in members]
        groups.append(
            MergeGroup(
                member_ids=[n.id for n in members],
                words=words,
                representative=_medoid(words, sub),
                covered_ids=set().union(*(n.covered_ids for n in members)),
                distances=sub,
            )
        )
    return groups


def _medoid(words: list[str], distances: list[list[float]]) -> str:
    """Member with the smallest average distance to the others; ties break
    lexicographically by word."""
    if len(words) == 1:
        return words[0]
    best = None
    for i, word in enumerate(words):
        avg = sum(distances[i][j] for j in range(len(words)) if j != i) / (len(words) - 1)
        key = (avg, word)
        if best is None or key < best[0]:
            best = (key, word)
    return best[1]


def find_merge_groups(
    artifact: MinedArtifact, embeddings: EmbeddingTable, cut: float = DEFAULT_CUT
) -> list[MergeGroup]:
    """Multi-member merge groups among the selected nodes."""
    candidates: dict[tuple[str, str], list[ShortcutNode]] = {}
    for node in artifact.selected_nodes():
        word = final_word(node)
        if word is None or word not in embeddings or node.aggregated:
            continue
        parent_template = merge_parent_template(node)
        parent_id = template_id(parent_template)
        if parent_id not in node.parent_ids:
            continue
        pred = node.whole.prediction_label
        candidates.setdefault((canonical(parent_template), pred), []).append(node)

    groups: list[MergeGroup] = []
    for key in sorted(candidates):
        siblings = sorted(candidates[key], key=lambda n: canonical(n.template))
        if len(siblings) < 2:
            continue
        for group in complete_linkage_cluster(siblings, artifact, embeddings, cut):
            if len(group.member_ids) >= 2:
                groups.append(group)
    return groups


def insert_aggregates(
    artifact: MinedArtifact, dataset: Dataset, groups: list[MergeGroup]
) -> MinedArtifact:
    """New artifact with one aggregate node per multi-member group: parent is
    the members' former parent, members are reparented underneath, and stats
    are recomputed from the pooled covered set (instances counted once)."""
    out = deepcopy(artifact)
    for group in groups:
        if len(group.member_ids) < 2:
            continue
        members = [out.nodes[mid] for mid in group.member_ids]
        parent_template = merge_parent_template(members[0])
        parent_id = template_id(parent_template)
        last = len(parent_template.slots) - 1
        agg_slot = Slot(
            pos=parent_template.slots[last].pos,
            word_set=frozenset(group.words),
            representative=group.representative,
        )
        agg_template = parent_template.with_slot(last, agg_slot)
        covered = set(group.covered_ids)
        stats = stats_for_ids(dataset, covered)
        agg = ShortcutNode(
            id=template_id(agg_template),
            template=agg_template,
            stats=stats,
            parent_ids=[parent_id],
            child_ids=sorted(group.member_ids),
            selected=passes_thresholds(stats, out.config),
            aggregated=True,
            covered_ids=covered,
        )
        out.nodes[agg.id] = agg
        parent = out.nodes[parent_id]
        parent.child_ids = sorted(
            (set(parent.child_ids) - set(group.member_ids)) | {agg.id}
        )
        for member in members:
            member.parent_ids = sorted(
                (set(member.parent_ids) - {parent_id}) | {agg.id}
            )
    return out


def aggregate_artifact(
    artifact: MinedArtifact,
    dataset: Dataset,
    embeddings: EmbeddingTable,
    cut: float = DEFAULT_CUT,
) -> MinedArtifact:
    return insert_aggregates(artifact, dataset, find_merge_groups(artifact, embeddings, cut))


def build_artifact(dataset: Dataset, config, cut: float = DEFAULT_CUT) -> MinedArtifact:
    """Mine, then aggregate when the dataset carries an embedding table."""
    from .mining import mine

    artifact = mine(dataset, config)
    if dataset.embeddings is not None and len(dataset.embeddings):
        artifact = aggregate_artifact(artifact, dataset, dataset.embeddings, cut)
    return artifact

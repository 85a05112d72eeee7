"""Seeded synthetic broadcasts: chat logs plus VFEA features.

Each 30-second block carries one game event (visible in the frame features)
and one featured player (named in the chat). The response window echoes a
phrase combining both, so a model has to read the video and the chat to pick
the right response.
"""
import json
import os

import numpy as np

from viddial.corpus.features import write_features

EVENTS = {
    "goal": ["what a goal {p}", "goal by {p}", "{p} scores again"],
    "save": ["great save {p}", "{p} saves it", "huge save by {p}"],
    "foul": ["{p} foul ref", "red card {p}", "that was a foul {p}"],
    "corner": ["corner kick {p}", "{p} takes the corner", "corner for {p}"],
    "miss": ["{p} missed it", "how did {p} miss", "{p} so close"],
}
PLAYERS = [
    "messi", "ronaldo", "neymar", "salah", "kane", "mbappe", "hazard", "kroos",
    "modric", "pogba", "griezmann", "suarez", "lewandowski", "benzema", "dybala",
    "aguero", "sterling", "sane", "silva", "ramos", "pique", "neuer", "degea",
]
CHATTER = [
    "lol", "kappa", "pogchamp", "this game is wild", "nice", "wow", "gg", "come on",
    "what is this", "haha", "ez", "so good", "unreal", "let's go",
]
EVENT_HINTS = {
    "goal": ["shoot", "net"], "save": ["keeper", "block"], "foul": ["tackle", "ref"],
    "corner": ["kick", "wing"], "miss": ["wide", "post"],
}


def event_prototypes(dim, seed=0):
    rng = np.random.default_rng([seed, 7])
    return {e: rng.normal(0.0, 1.0, size=dim) for e in sorted(EVENTS)}


def generate_video(rng, n_blocks, feat_dim, fps=3, prototypes=None, users=None, context_utts=(4, 7),
                   hint_prob=0.0, block_spec=None):
    """Return ``(chat_records, frames, blocks)`` for one synthetic video.

    ``block_spec`` optionally fixes ``(event, player, template_idx)`` per block.
    """
    prototypes = prototypes or event_prototypes(feat_dim)
    users = users or [f"fan{i:02d}" for i in range(12)]
    events = sorted(EVENTS)
    records = []
    blocks = []
    frames = np.zeros((int(30 * n_blocks * fps), feat_dim))
    for k in range(n_blocks):
        base = 30.0 * k
        if block_spec is not None:
            event, player, tidx = block_spec[k]
        else:
            event = events[rng.integers(len(events))]
            player = PLAYERS[rng.integers(len(PLAYERS))]
            tidx = int(rng.integers(len(EVENTS[event])))
        a, b = int(base * fps), int((base + 30) * fps)
        frames[a:b] = rng.normal(0.0, 0.3, size=(b - a, feat_dim)) + prototypes[event]
        n_ctx = int(rng.integers(context_utts[0], context_utts[1] + 1))
        times = np.sort(rng.uniform(base + 0.5, base + 19.5, size=n_ctx))
        speakers = [users[i] for i in rng.choice(len(users), size=min(3, len(users)), replace=False)]
        for i, t in enumerate(times):
            words = [CHATTER[rng.integers(len(CHATTER))]]
            if i == 0 or rng.random() < 0.5:
                words.append(player)
            if rng.random() < hint_prob:
                words.append(EVENT_HINTS[event][rng.integers(2)])
            records.append({"time": round(float(t), 3), "user": speakers[i % len(speakers)], "text": " ".join(words)})
        response = EVENTS[event][tidx].format(p=player)
        rt = np.sort(rng.uniform(base + 20.5, base + 29.5, size=3))
        records.append({"time": round(float(rt[0]), 3), "user": speakers[0], "text": CHATTER[rng.integers(len(CHATTER))] + " !"})
        records.append({"time": round(float(rt[1]), 3), "user": speakers[1], "text": response})
        records.append({"time": round(float(rt[2]), 3), "user": speakers[-1], "text": response})
        blocks.append({"event": event, "player": player, "response": response})
    return records, frames, blocks


def _distinct_specs(rng, count):
    combos = [(e, p) for e in sorted(EVENTS) for p in PLAYERS]
    if count > len(combos):
        raise ValueError(f"only {len(combos)} distinct (event, player) blocks exist, asked for {count}")
    picks = rng.permutation(len(combos))[:count]
    return [(combos[i][0], combos[i][1], int(rng.integers(3))) for i in picks]


def write_corpus(out_dir, n_videos=4, n_blocks=2, feat_dim=16, fps=3, seed=0, prefix="vid",
                 distinct_blocks=False, shared_prototypes=True, prototype_seed=0, **kwargs):
    """Write ``chat/<vid>.jsonl`` and ``features/<vid>.vfea`` under ``out_dir``.

    ``distinct_blocks`` gives every block its own (event, player) pair, so no
    two responses coincide. With ``shared_prototypes=False`` each video draws
    its own event appearance, which makes every video's frames separable.
    Otherwise appearance comes from ``prototype_seed`` alone, so corpora
    written with different ``seed`` values still look alike.
    Returns the block descriptions keyed by video id.
    """
    rng = np.random.default_rng(seed)
    prototypes = event_prototypes(feat_dim, prototype_seed)
    specs = _distinct_specs(rng, n_videos * n_blocks) if distinct_blocks else None
    chat_dir = os.path.join(out_dir, "chat")
    feat_dir = os.path.join(out_dir, "features")
    os.makedirs(chat_dir, exist_ok=True)
    os.makedirs(feat_dir, exist_ok=True)
    meta = {}
    for v in range(n_videos):
        vid = f"{prefix}{v:03d}"
        if not shared_prototypes:
            prototypes = {e: rng.normal(0.0, 1.0, size=feat_dim) for e in sorted(EVENTS)}
        if specs is not None:
            kwargs["block_spec"] = specs[v * n_blocks:(v + 1) * n_blocks]
        records, frames, blocks = generate_video(rng, n_blocks, feat_dim, fps, prototypes, **kwargs)
        with open(os.path.join(chat_dir, f"{vid}.jsonl"), "w", encoding="utf-8") as fh:
            for r in records:
                fh.write(json.dumps(r) + "\n")
        write_features(os.path.join(feat_dir, f"{vid}.vfea"), frames)
        meta[vid] = blocks
    return meta

"""One mask-sum round over the message channel: split, deliver, sum,
encrypt the sums to the aggregator, reconstruct.

Share sums travel encrypted under the aggregator's public key; the
pairwise share deliveries ride the channel's assumed-secure links.
"""

from __future__ import annotations

import random

from ..crypto import decrypt, encrypt
from .shamir import MaskSecret, reconstruct_sum, split_secret, sum_local_shares


def mask_sum_round(channel, utility: str, agent_ids,
                   secrets: dict[str, MaskSecret], utility_keys,
                   rng: random.Random, round_id: int = 0) -> int:
    """Returns the reconstructed mask-sum mantissa at the utility."""
    agent_ids = list(agent_ids)
    m = len(agent_ids)
    points = {aid: j + 1 for j, aid in enumerate(agent_ids)}
    zs = tuple(points[a] for a in agent_ids)

    for aid in agent_ids:
        bundle = split_secret(secrets[aid], m, zs)
        for peer in agent_ids:
            if peer != aid:
                channel.send("SHARE", aid, peer, {
                    "round": round_id, "point": points[peer],
                    "value": bundle.share_for(points[peer])})
        channel.send("SHARE", aid, aid, {
            "round": round_id, "point": points[aid],
            "value": bundle.share_for(points[aid])})

    for aid in agent_ids:
        received = [msg.payload["value"] for msg in channel.receive(aid)
                    if msg.kind == "SHARE"]
        local_sum = sum_local_shares(received)
        ct = encrypt(utility_keys.public, local_sum, rng)
        channel.send("SHARE_SUM", aid, utility, {
            "round": round_id, "point": points[aid],
            "cipher": ct.to_decimal()})

    sums = {}
    for msg in channel.receive(utility):
        if msg.kind == "SHARE_SUM" and msg.payload["round"] == round_id:
            from ..crypto import Ciphertext
            ct = Ciphertext.from_decimal(msg.payload["cipher"])
            sums[msg.payload["point"]] = decrypt(utility_keys, ct)
    pts = sorted(sums)
    return reconstruct_sum(tuple(pts), [sums[z] for z in pts])

import socket

import pytest


def _hub_reachable() -> bool:
    try:
        socket.getaddrinfo("huggingface.co", 443)
        return True
    except OSError:
        return False


HUB_AVAILABLE = _hub_reachable()

needs_model_hub = pytest.mark.skipif(
    not HUB_AVAILABLE,
    reason="model hub unreachable and no cached weights in this environment")


class StubSrlEngine:
    """Deterministic first-noun-phrase / verb / rest tagger for format tests.

    Mimics the engine interface without weights: the token before the first
    known verb is extended back to the subject, the verb gets a B-V tag,
    everything after it becomes the patient span.
    """

    VERBS = {"love": "love.01", "loves": "love.01", "back": "back.01",
             "backs": "back.01", "kills": "kill.01", "supports": "support.01"}

    def tag(self, sentences):
        out = []
        for sentence in sentences:
            tokens = sentence.rstrip(".!?").split()
            tags = ["O"] * len(tokens)
            verb_at = next((i for i, t in enumerate(tokens)
                            if t.lower() in self.VERBS), None)
            if verb_at is not None and 0 < verb_at < len(tokens) - 1:
                tags[0] = "B-A0"
                for i in range(1, verb_at):
                    tags[i] = "I-A0"
                tags[verb_at] = f"B-V-{self.VERBS[tokens[verb_at].lower()]}"
                tags[verb_at + 1] = "B-A1"
                for i in range(verb_at + 2, len(tokens)):
                    tags[i] = "I-A1"
            out.append((tokens, tags))
        return out

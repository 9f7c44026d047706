"""Behavioral reference for the traffic light controller."""

S1_RED, S2_GREEN, S3_YELLOW = 0, 1, 2


class RefModel:
    def reset(self):
        self.state = S1_RED
        self.cnt = 10
        self.p = {"red": 1, "green": 0, "yellow": 0}
        self.out = {"red": 0, "yellow": 0, "green": 0}

    def step(self, inputs):
        if inputs["rst_n"] == 0:
            self.reset()
            return dict(self.out)

        # all registers update from pre-edge values (non-blocking semantics)
        state, cnt, p, out = self.state, self.cnt, dict(self.p), dict(self.out)

        if state == S1_RED:
            self.p = {"red": 1, "green": 0, "yellow": 0}
            self.state = S2_GREEN if cnt == 3 else S1_RED
        elif state == S2_GREEN:
            self.p = {"red": 0, "green": 1, "yellow": 0}
            self.state = S3_YELLOW if cnt == 3 else S2_GREEN
        else:
            self.p = {"red": 0, "green": 0, "yellow": 1}
            self.state = S1_RED if cnt == 3 else S3_YELLOW

        if not out["green"] and p["green"]:
            self.cnt = 60
        elif not out["yellow"] and p["yellow"]:
            self.cnt = 5
        elif not out["red"] and p["red"]:
            self.cnt = 10
        elif cnt > 0:
            self.cnt = cnt - 1
        else:
            self.cnt = 0

        self.out = {"red": p["red"], "yellow": p["yellow"], "green": p["green"]}
        return dict(self.out)

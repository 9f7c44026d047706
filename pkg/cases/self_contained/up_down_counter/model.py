"""Behavioral reference for the up/down counter."""


class RefModel:
    def reset(self):
        self.q = 0

    def step(self, inputs):
        if inputs["rst"]:
            self.q = 0
        elif inputs["en"]:
            delta = 1 if inputs["up"] else -1
            self.q = (self.q + delta) & 0xF
        return {"q": self.q}

"""Behavioral reference for the 4-bit Gray-code counter."""


class RefModel:
    def reset(self):
        self.cnt = 0
        self.q = 0

    def step(self, inputs):
        if inputs["rst_n"] == 0:
            self.reset()
        else:
            self.q = self.cnt ^ (self.cnt >> 1)
            self.cnt = (self.cnt + 1) & 0xF
        return {"q": self.q}

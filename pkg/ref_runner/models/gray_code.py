"""4-bit Gray-code counter reference model.

Holds at zero while rst_n is asserted; after release the output walks the
reflected-binary sequence 0, 1, 3, 2, 6, 7, 5, 4, 12, ...
"""


class RefModel:
    def reset(self):
        self.cnt = 0

    def step(self, inputs):
        if inputs.get("rst_n", 1) == 0:
            self.cnt = 0
            return {"q": 0}
        q = self.cnt ^ (self.cnt >> 1)
        self.cnt = (self.cnt + 1) & 0xF
        return {"q": q}

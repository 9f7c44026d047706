"""Behavioral reference for the 4-bit carry look-ahead adder."""


class RefModel:
    def reset(self):
        pass

    def step(self, inputs):
        total = inputs["a"] + inputs["b"] + inputs["cin"]
        return {"sum": total & 0xF, "cout": (total >> 4) & 1}

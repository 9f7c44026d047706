"""Behavioral reference for the 8-bit ALU."""


class RefModel:
    OPS = {
        0: lambda a, b: a + b,
        1: lambda a, b: a - b,
        2: lambda a, b: a & b,
        3: lambda a, b: a | b,
        4: lambda a, b: a ^ b,
        5: lambda a, b: (~a) & 0xFF,
        6: lambda a, b: int(a < b),
        7: lambda a, b: b,
    }

    def reset(self):
        pass

    def step(self, inputs):
        y = self.OPS[inputs["op"]](inputs["a"], inputs["b"]) & 0xFF
        return {"y": y, "zero": int(y == 0)}

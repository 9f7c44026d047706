"""Behavioral reference for the three-input minimum."""


class RefModel:
    def reset(self):
        pass

    def step(self, inputs):
        return {"min_val": min(inputs["a"], inputs["b"], inputs["c"])}

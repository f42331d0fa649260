"""Brute-force reference for the row-dropping rules, independent of the package.

Tables, erasures and rule conditions are recomputed here from their
definitions with plain lists and sets. ``moves`` lists every legal drop from a
state; ``expungeable`` explores all orders of all moves.
"""
from functools import lru_cache
from itertools import combinations, combinations_with_replacement


class Oracle:
    def __init__(self, delta, r, d, m, w, strict_vi=True):
        self.delta = tuple(delta)
        self.g = len(delta)
        self.r, self.d, self.m = r, d, m
        self.strict_vi = strict_vi
        # vanishing table, column by column
        va = [[0] * self.g for _ in range(r + 1)]
        vb = [[0] * self.g for _ in range(r + 1)]
        for j in range(r + 1):
            a = j
            for i in range(self.g):
                b = d - a - (0 if self.delta[i] == j else 1)
                va[j][i], vb[j][i] = a, b
                a = d - b
        self.rows = list(combinations_with_replacement(range(r + 1), m))
        self.a = {J: [sum(va[j][i] for j in J) for i in range(self.g)] for J in self.rows}
        self.b = {J: [sum(vb[j][i] for j in J) for i in range(self.g)] for J in self.rows}
        self.present = {}
        for J in self.rows:
            # suffix sums of (a-values of J) - w over positions i+1..g
            sums = []
            for i in range(self.g):
                sums.append(sum(self.a[J][k] - w[k - 1] for k in range(i + 1, self.g)))
            low = min(sums)
            self.present[J] = [s == low for s in sums]

    def shown(self, remaining, i):
        return [J for J in remaining if self.present[J][i]]

    def moves(self, remaining):
        """All (rule, column, dropped rows) legal in the state; columns are 1-based."""
        remaining = frozenset(remaining)
        out = set()
        g, m = self.g, self.m
        for i in range(g):
            col = self.shown(remaining, i)
            for vals, rule in ((self.a, "II"), (self.b, "III")):
                if not col:
                    break
                low = min(vals[J][i] for J in col)
                winners = [J for J in col if vals[J][i] == low]
                if len(winners) == 1:
                    out.add((rule, i + 1, frozenset(winners)))
            if 0 < len(col) <= 2:
                for size in (1, 2):
                    for sub in combinations(col, size):
                        out.add(("IV", i + 1, frozenset(sub)))
            for j in range(self.r + 1):
                if j == self.delta[i]:
                    continue
                for n in range(m + 1):
                    if all(J.count(j) >= n for J in col):
                        exact = [J for J in col if J.count(j) == n]
                        if len(exact) == 1:
                            out.add(("V", i + 1, frozenset(exact)))
            if i + 1 < g:
                for pair in combinations(sorted(remaining), 2):
                    if self._vi(remaining, i, pair):
                        out.add(("VI", i + 1, frozenset(pair)))
            if m == 2:
                for drop in self._vii(remaining, i):
                    out.add(("VII", i + 1, drop))
        return out

    def _vi(self, remaining, i, pair):
        j1, j2 = pair
        here, there = self.shown(remaining, i), self.shown(remaining, i + 1)
        if self.strict_vi and not all(J in here and J in there for J in pair):
            return False
        if self.a[j1][i] != self.a[j2][i]:
            return False
        if any(self.a[J][i] <= self.a[j1][i] for J in here if J not in pair):
            return False
        if self.b[j1][i + 1] != self.b[j2][i + 1]:
            return False
        if any(self.b[J][i + 1] <= self.b[j1][i + 1] for J in there if J not in pair):
            return False
        for ip in (i, i + 1):
            v = self.delta[ip]
            if all(J.count(v) == self.m - 2 for J in pair):
                diag = (v,) * self.m
                if self.a[j1][ip] != self.a[diag][ip] - 1:
                    return True
        return False

    def _vii(self, remaining, i):
        v = self.delta[i]
        diag = (v, v)
        straddle = [J for J in self.shown(remaining, i) if J[0] < v < J[1]]
        for n in range(2, len(straddle) + 1):
            if i + n > self.g:
                break
            if any(self.delta[ip] != v for ip in range(i, i + n)):
                continue
            for js in combinations(straddle, n):
                if len({self.a[J][i] for J in js}) != 1:
                    continue
                ok = True
                for ip in range(i, i + n):
                    col = set(self.shown(remaining, ip))
                    if not set(js) <= col or col - set(js) - {diag}:
                        ok = False
                        break
                if ok:
                    yield frozenset(js) | (frozenset([diag]) & remaining)

    def expungeable(self, selected) -> bool:
        @lru_cache(maxsize=None)
        def reach(state):
            if not state:
                return True
            return any(reach(state - drop) for _, _, drop in self.moves(state))

        return reach(frozenset(selected))

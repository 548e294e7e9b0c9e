"""Brute-force multiplication-table groups.

Independent reference implementation used to validate the collection
engine and the structural modules on small groups (order <= 3^5 or so).
Nothing here touches the kernel: the table is built once from the
presentation's relations by naive word rewriting on explicit words, and
all queries (orders, centralizers, series) are computed straight from the
table.
"""

from itertools import product


class TableGroup:
    """Finite group as an explicit multiplication table.

    Elements are integers 0..N-1; 0 is the identity.  Built from a
    PcPresentation but by an independent route: elements are the normal
    exponent vectors, and products are computed by a reference rewriting
    that never reuses the package kernel.
    """

    def __init__(self, elements, mult_table):
        self.elements = list(elements)
        self.index = {e: i for i, e in enumerate(self.elements)}
        self.table = mult_table
        self.N = len(self.elements)

    @classmethod
    def from_presentation(cls, pres):
        p, n = pres.p, pres.n
        powers = pres.powers
        comms = pres.comms

        def rewrite(word):
            """Reference normalizer: repeatedly fix the leftmost defect of
            a word (list of generator indices, exponent +1 each)."""
            word = list(word)
            while True:
                changed = False
                # find leftmost adjacent inversion g_a g_b with a > b
                for k in range(len(word) - 1):
                    a, b = word[k], word[k + 1]
                    if a > b:
                        c = comms.get((a, b))
                        tail = []
                        if c is not None:
                            for g, e in enumerate(c):
                                tail.extend([g] * e)
                        word[k:k + 2] = [b, a] + tail
                        changed = True
                        break
                if changed:
                    continue
                # now nondecreasing; fix the leftmost run of length >= p
                run_start = 0
                done = True
                for k in range(1, len(word) + 1):
                    if k == len(word) or word[k] != word[run_start]:
                        if k - run_start >= p:
                            g = word[run_start]
                            tail = []
                            for h, e in enumerate(powers[g]):
                                tail.extend([h] * e)
                            word[run_start:run_start + p] = tail
                            done = False
                            break
                        run_start = k
                if done:
                    return tuple(
                        sum(1 for g in word if g == i) for i in range(n)
                    )

        elements = list(product(range(p), repeat=n))
        # identity first
        elements.sort()
        assert elements[0] == (0,) * n

        def as_word(vec):
            w = []
            for g, e in enumerate(vec):
                w.extend([g] * e)
            return w

        N = len(elements)
        idx = {e: i for i, e in enumerate(elements)}
        table = [[0] * N for _ in range(N)]
        for i, u in enumerate(elements):
            wu = as_word(u)
            for j, v in enumerate(elements):
                table[i][j] = idx[rewrite(wu + as_word(v))]
        return cls(elements, table)

    # -- queries -------------------------------------------------------

    def mul(self, i, j):
        return self.table[i][j]

    def inv(self, i):
        row = self.table[i]
        for j in range(self.N):
            if row[j] == 0:
                return j
        raise AssertionError("no inverse found")

    def element_order(self, i):
        o = 1
        x = i
        while x != 0:
            x = self.table[x][i]
            o += 1
        return o

    def comm(self, i, j):
        a = self.mul(self.mul(self.inv(i), self.inv(j)), self.mul(i, j))
        return a

    def centralizer(self, i):
        return [j for j in range(self.N) if self.mul(i, j) == self.mul(j, i)]

    def center(self):
        out = []
        for j in range(self.N):
            if all(self.mul(i, j) == self.mul(j, i) for i in range(self.N)):
                out.append(j)
        return out

    def subgroup_closure(self, gens):
        seen = {0}
        frontier = [0]
        gens = list(gens)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return sorted(seen)

    def commutator_subgroup(self, a_set, b_set):
        gens = {self.comm(a, b) for a in a_set for b in b_set}
        return self.subgroup_closure(gens)

    def lower_central_series(self):
        whole = list(range(self.N))
        series = [whole]
        cur = whole
        while True:
            nxt = self.commutator_subgroup(cur, whole)
            if nxt == cur:
                break
            series.append(nxt)
            cur = nxt
            if cur == [0]:
                break
        return series

    def upper_central_series(self):
        series = [[0]]
        cur = {0}
        while True:
            nxt = [
                j for j in range(self.N)
                if all(self.comm(j, i) in cur for i in range(self.N))
            ]
            if len(nxt) == len(cur):
                break
            series.append(nxt)
            cur = set(nxt)
            if len(cur) == self.N:
                break
        return series

    def all_subgroups(self):
        """Every subgroup, as a sorted element tuple.  Exponential; only
        for small N."""
        found = {(0,)}
        frontier = [(0,)]
        while frontier:
            h = frontier.pop()
            hset = set(h)
            for g in range(1, self.N):
                if g in hset:
                    continue
                bigger = tuple(self.subgroup_closure(list(h) + [g]))
                if bigger not in found:
                    found.add(bigger)
                    frontier.append(bigger)
        return sorted(found, key=lambda t: (len(t), t))

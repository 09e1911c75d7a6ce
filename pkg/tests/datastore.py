# Copyright 2026 The dqvm authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

PROGRAM = """
; patterns written out by hand
(defpattern HAD () (?i ?o) (?i) (?o) ((E ?i ?o) (M ?i 0) (X ?o (s ?i))))
(defpattern JA (alpha) (?i ?o) (?i) (?o) ((E ?i ?o) (M ?i -alpha) (X ?o (s ?i))))

; CNOT from a composition graph, target first
(defcompose CNOT (compose (use H as h1) (use CZ as cz) (use H as h2)
                          (link (h1.?o cz.2) (cz.2 h2.?i))))
(defcompose HH (seq HAD HAD))
(defcompose IH (par I HAD))
(defcompose JQ (compose (use JA as j pi/2)))

; teleportation over a preshared pair
(defagent SENDER (1 2) (c1 c2) ((E 1 2) (M 1 0) (M 2 0) (send c1 (s 1)) (send c2 (s 2))))
(defagent RECEIVER (3) (d1 d2) ((recv d1 x1) (recv d2 x2) (Z 3 x1) (X 3 x2)))
(defnetwork TELEPORT
  (resource ((2 3) () (2 3) ((E 2 3))))
  (agent A SENDER)
  (agent B RECEIVER)
  (config (qubits) (channels (A.c1 B.d1) (A.c2 B.d2))))

; a single agent calling a pattern
(defagent HOLDER (?q) () ((do HAD ?q ?out)))
(defnetwork SOLO (agent A HOLDER) (config))
"""

BROKEN = """
(defpattern SWAPPED () (?i ?o) (?i) (?o) ((E ?o ?i) (M ?o 0) (X ?o (s ?i))))
(defpattern EARLY () (1 2) (1) (2) ((M 1 0) (X 2 (s 1))))
(defpattern FINE () (?q) (?q) (?q) ())
"""

CYCLIC = """
(defcompose LOOP (compose (use H as a) (use H as b) (link (a.?o b.?i) (b.?o a.?i))))
"""

SELF_REFERENCE = """
(defcompose SELF (seq SELF H))
"""

UNKNOWN_REFERENCE = """
(defcompose MISSING (seq H NOPE))
"""

DEADLOCK = """
(defagent WAITER () (c) ((recv c x) (send c 1)))
(defnetwork STUCK
  (agent A WAITER)
  (agent B WAITER)
  (config (qubits) (channels (A.c B.c))))
"""

DUPLICATE = """
(defpattern P () (?q) (?q) (?q) ())
(defpattern P () (?q) (?q) (?q) ())
"""

UNBALANCED = """
(defpattern P () (?q) (?q) (?q) ()
"""

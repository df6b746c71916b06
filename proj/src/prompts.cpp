#include "arcadia/proposer.hpp"

// Prompt templates. Placeholders are {lower_case} identifiers filled by
// render_template(); literal JSON braces are left untouched.

namespace arcadia::prompts {

const std::string_view system_initial = R"PROMPT(You are an autonomous causal-inference researcher.

**Objective** Estimate the causal effect of **{treatment} -> {outcome}** by proposing
an initial Directed Acyclic Graph (DAG).

Remember that {treatment} and {outcome} MUST BE IN THE DAG.

**Task**
Propose a starting DAG with between {initial_min_cols} and {initial_max_cols} nodes that represents
your best hypothesis about the causal relationships between the treatment, outcome,
and potential confounders or mediators. The graph must be acyclic.

---
### Causal-assumption checklist
In **your `assumptions` field** explicitly answer:
1. *Unobserved confounding*: which latent factors remain, and how do your chosen variables proxy for them?
2. *Positivity*: are there sub-groups where treatment is (almost) deterministic?
3. *Consistency / SUTVA*: why is {treatment} well-defined and why don't firms interfere?
4. *Temporal ordering*: confirm every parent variable predates its children (2015 -> 2017).
If any assumption looks doubtful, flag it.

)PROMPT";

const std::string_view current_user = R"PROMPT(Iteration {iteration}: Propose a DAG with the following schema.

Return a JSON object exactly in the following schema.
Available columns: {all_cols_str}

MUST STRICTLY USE THE SAME COLUMN NAMES AS IN THE WORKING DATAFRAME.
YOU ARE ONLY ALLOWED TO ADD/REMOVE/SWAP COLUMNS A MAXIMUM OF {max_refinement_cols} TIMES.

Each record represents a medium-to-large Italian non-financial company with
2015-2017 financial-statement features.
Columns that start with "delta" are year-over-year changes.
`bankruptcy` = 1 if the firm filed for bankruptcy during 2018-2019, else 0.

Remember that {treatment} and {outcome} MUST BE IN THE DAG.

{
    "reasoning": "string",
    "assumptions": "string",
    "edges": [["parent", "child"], ["parent", "child"], ...],
}

)PROMPT";

const std::string_view previous_user = R"PROMPT(Iteration {iteration}: Propose a new DAG with the following schema.
YOU ARE ONLY ALLOWED TO ADD/REMOVE/SWAP COLUMNS A MAXIMUM OF {max_refinement_cols} TIMES.

Return a JSON object exactly in the following schema.

{
    "reasoning": "string",
    "assumptions": "string",
    "edges": [["parent", "child"], ["parent", "child"], ...],
}

)PROMPT";

const std::string_view system_refinement = R"PROMPT(
### Your task

Based on the historical feedback, propose a *refined* DAG that addresses the recurring issues.
* You may **add, swap, or remove up to {max_refinement_cols} columns** compared with the
  previous DAG in the past messages.
* Keep the graph acyclic and ensure the total node count stays within the
  allowed range.

Explain your causal reasoning **first**, output a new DAG with
a JSON object that matches the provided schema.

CAUSAL INFERENCE OBJECTIVE: Discover the true causal relationship between {treatment} and {outcome} by testing different DAG structures that reflect theoretical possibilities.

FUNDAMENTAL PRINCIPLE: You are DISCOVERING causal structure, not engineering it. Variable changes should reflect different theories about how the world actually works.

DECISION HIERARCHY:

PRIORITY 1: CAUSAL IDENTIFICATION
- If minimal_adj_set is null -> Test alternative theoretical frameworks:
  a) ADD a major confounder you may have missed (unobserved heterogeneity proxies)
  b) SWAP to variables representing different theoretical mechanisms
  c) If repeatedly null across reasonable theories -> Accept that identification may require external variation
- If minimal_adj_set exists -> These variables are REQUIRED (cannot be removed without theoretical justification)

PRIORITY 2: THEORETICAL VALIDITY
- If orientation_ok is false -> Consider alternative causal theories:
  a) Maybe the true causal direction is reversed
  b) Maybe there's bidirectional causation
  c) Maybe there's an unmeasured common cause
- DAG structure must reflect plausible real-world causal mechanisms

PRIORITY 3: EFFECT DETECTION AND PRECISION
- If treatment -> bankruptcy is insignificant -> Consider:
  a) True effect might be zero (not a problem to fix)
  b) ADD precision variables (reduce outcome noise)
  c) TEST different theoretical pathways (direct vs. mediated effects)
- Focus on identifying the effect that actually exists, not manufacturing significance

PRIORITY 4: MODEL DIAGNOSTICS
- High VIF: Accept if variables are causally necessary; avoid if redundant
- Low R^2: Accept if causal structure is sound; only improve if it aids identification

SPECIFIC DECISION RULES:

WHEN TO ADD A VARIABLE:
- Testing a new theoretical mechanism (e.g., "maybe leverage is the key confounder")
- Proxying for unobserved confounders (e.g., management quality via efficiency ratios)
- Improving precision of causal estimates (reducing noise)
- Exploring mediation pathways suggested by theory

WHEN TO SWAP A VARIABLE:
- Current variable contradicts theoretical expectations consistently
- Testing competing theoretical frameworks (e.g., size vs. efficiency as key factor)
- Current variable provides no causal information and theory suggests better proxy

WHEN TO RETAIN A PROBLEMATIC VARIABLE:
- It's in minimal_adj_set (causally required)
- Strong theoretical justification even if statistically weak
- Part of the causal mechanism you're investigating

VARIABLE SELECTION LOGIC:
1. What causal mechanism am I testing? (theory-driven)
2. What confounders does this theory require? (identification-driven)
3. How can I best measure these constructs? (measurement-driven)
4. NOT: How can I maximize statistical metrics?

HANDLING COMMON SCENARIOS:

NULL MINIMAL ADJUSTMENT SET:
-> "The current theory implies the effect isn't identifiable. Let me test a different theoretical framework."
NOT: "Let me add variables until it becomes identifiable."

INSIGNIFICANT TREATMENT EFFECT:
-> "Maybe the effect is truly small/zero, or I need better measurement."
NOT: "Let me add variables until it becomes significant."

FALSE ORIENTATION:
-> "Maybe my causal assumptions are wrong. Let me test the reverse direction."
NOT: "Let me add controls until orientation becomes true."

ITERATION FOCUS:
Each iteration should test a coherent theoretical story:
- "Theory A: Firm size is the key confounder"
- "Theory B: Operational efficiency drives everything"
- "Theory C: Industry dynamics dominate"

NOT: "Let me try adding this variable and see what happens"

**Verification criteria** All six conditions must hold simultaneously to declare the thesis VERIFIED:

1. *Identifiable* - `minimal_adjustment_set` is not null.
2. *Orientation* - treatment -> outcome has DeltaBIC > 0.
3. *Edge significance* - p-value < {alpha} (or a justified negligible effect).
4. *Global validity* >= {global_validity_threshold} and average R^2 >= {r2_threshold}.
5. *No multicollinearity* - every VIF <= {vif_threshold}.


### Causal-assumption checklist
In **your `assumptions` field** explicitly answer:
1. *Unobserved confounding*: which latent factors remain, and how do your chosen variables proxy for them?
2. *Positivity*: are there sub-groups where treatment is (almost) deterministic?
3. *Consistency / SUTVA*: why is {treatment} well-defined and why don't firms interfere?
4. *Temporal ordering*: confirm every parent variable predates its children (2015 -> 2017).

If any assumption looks doubtful, flag it.

REMEMBER: Your goal is scientific discovery of causal relationships, not optimization of statistical metrics. A well-identified small effect is more valuable than a poorly-identified large effect.

Reason on previous DAGs. What worked and what didn't? And propose a new DAG.

REMEMBER TO ADD/SWAP/REMOVE A MAXIMUM OF {max_refinement_cols} COLUMNS. You must list your changes as part of the reasoning, including a complete rationale based on financial theory AND statistical metrics.

Return a JSON object exactly in the following schema.

{
    "reasoning": "string",
    "assumptions": "string",
    "edges": [["parent", "child"], ["parent", "child"], ...],
}

)PROMPT";

} // namespace arcadia::prompts

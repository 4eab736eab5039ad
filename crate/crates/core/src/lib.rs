/*!
Counterfactual well-being and group flourishing over small, explicit
multiverses.

A scenario lists possible worlds as closed sets of timed assertions such as
`jack.pain@3 = 5`. From it this crate computes:

* the value of an event for an agent: the agent's well-being where the event
  happens minus their well-being in the most similar worlds where it does not;
* the value of a stretch of life: welfare (aggregate well-being plus a term
  for the shape of the life) against comparison worlds;
* group flourishing: how well a group's members realize its function through
  role-borne activities, computed without reading any member's well-being.

Individual well-being is pluggable; hedonic, desire-satisfaction and
objective-list theories ship with the crate.

```
use flourish::{dsl, query::{evaluate, Overrides, Query, Settings}, world::Event};

let doc = dsl::parse("
scenario hill
agent jack
world W_HIT  { assert jack.pain@0 = 0  assert jack.pain@1 = 5 }
world W_SAFE { assert jack.pain@0 = 0  assert jack.pain@1 = 0 }
").unwrap();
let query = Query::Event {
    world: Some("W_HIT".into()),
    event: "jack.pain@1=5".parse::<Event>().unwrap(),
    agent: "jack".into(),
    at: None,
};
let settings = Settings::resolve(&doc, Some(&query), &Overrides::default()).unwrap();
assert_eq!(evaluate(&doc, &query, &settings).unwrap().value(), -5.0);
```
*/

pub mod cli;
pub mod counterfactual;
pub mod dsl;
pub mod error;
pub mod group;
pub mod group_calc;
pub mod individual;
pub mod neutrality;
pub mod oracle;
pub mod query;
pub mod scenario;
pub mod stats;
pub mod theory;
pub mod world;

pub use crate::error::{EvalError, Result};
pub use crate::scenario::{Scenario, ScenarioDocument};
pub use crate::theory::{Theory, TheoryConfig, TheoryKind, WellbeingTheory};
pub use crate::world::{Event, Ident, Interval, TimePoint, Value, World};

// The guide's code blocks run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/events.md")]
    mod events {}
    #[doc = include_str!("../../../book/src/theories.md")]
    mod theories {}
    #[doc = include_str!("../../../book/src/welfare.md")]
    mod welfare {}
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/neutrality.md")]
    mod neutrality {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

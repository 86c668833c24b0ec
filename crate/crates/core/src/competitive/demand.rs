use num_traits::Zero;

use super::PriceVector;
use crate::instance::Instance;
use crate::rational::{self, Rational};

/// What a unit budget buys at fixed prices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandSummary {
    /// Everything acceptable is affordable.
    pub satiated: bool,
    pub fully_bought: Vec<usize>,
    /// Equal-priced objects among which the leftover budget is spent.
    pub marginal_class: Vec<usize>,
    pub marginal_price: Option<Rational>,
    /// Total units bought from the marginal class.
    pub marginal_quantity: Rational,
    pub spend: Rational,
}

impl DemandSummary {
    pub fn utility(&self) -> Rational {
        rational::int(self.fully_bought.len() as i64) + &self.marginal_quantity
    }
}

/// Cheapest-first purchase of acceptable objects with a budget of 1.
pub fn demand(inst: &Instance, agent: usize, p: &PriceVector) -> DemandSummary {
    let mut acceptable = inst.acceptable_set(agent);
    acceptable.sort_by(|&x, &y| p.get(x).cmp(p.get(y)).then(x.cmp(&y)));
    let mut spend = Rational::zero();
    let mut fully_bought = Vec::new();
    let one = rational::int(1);
    let mut idx = 0;
    while idx < acceptable.len() {
        let price = p.get(acceptable[idx]).clone();
        let mut end = idx;
        while end < acceptable.len() && *p.get(acceptable[end]) == price {
            end += 1;
        }
        let class = &acceptable[idx..end];
        let cost = &price * rational::int(class.len() as i64);
        if &spend + &cost <= one {
            spend += cost;
            fully_bought.extend_from_slice(class);
            idx = end;
            continue;
        }
        let quantity = (&one - &spend) / &price;
        let mut marginal_class = class.to_vec();
        marginal_class.sort_unstable();
        fully_bought.sort_unstable();
        return DemandSummary {
            satiated: false,
            fully_bought,
            marginal_class,
            marginal_price: Some(price),
            marginal_quantity: quantity,
            spend: one,
        };
    }
    fully_bought.sort_unstable();
    DemandSummary {
        satiated: true,
        fully_bought,
        marginal_class: Vec::new(),
        marginal_price: None,
        marginal_quantity: Rational::zero(),
        spend,
    }
}

use crate::characteristics::Report;

/// `name,value,se` rows; `se` is empty for a single realization.
pub fn report_csv(r: &Report) -> String {
    let mut s = String::from("name,value,se\n");
    for (k, v) in &r.values {
        let se = r.se.get(k).map(|x| format!("{x:?}")).unwrap_or_default();
        s.push_str(&format!("{k},{v:?},{se}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows() {
        let mut r = Report::single(2);
        r.set("gamma2", 0.1);
        assert_eq!(report_csv(&r), "name,value,se\ngamma2,0.1,\n");
    }
}

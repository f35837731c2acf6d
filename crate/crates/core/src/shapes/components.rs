use super::GridSet;

/// 8-connected components of the true cells, in scan order of their first cell.
pub fn components(set: &GridSet) -> Vec<GridSet> {
    let spec = *set.spec();
    let (nx, ny) = (spec.cells_x as i64, spec.cells_y as i64);
    let mut label = vec![usize::MAX; spec.len()];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..spec.len() {
        if !set.mask()[start] || label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut comp = GridSet::empty(spec);
        label[start] = id;
        stack.push(start);
        while let Some(i) = stack.pop() {
            let (x, y) = spec.coords(i);
            comp.set(x, y, true);
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let (qx, qy) = (x as i64 + dx, y as i64 + dy);
                    if qx < 0 || qy < 0 || qx >= nx || qy >= ny {
                        continue;
                    }
                    let q = spec.index(qx as usize, qy as usize);
                    if set.mask()[q] && label[q] == usize::MAX {
                        label[q] = id;
                        stack.push(q);
                    }
                }
            }
        }
        out.push(comp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::{GridSpec, Point};

    #[test]
    fn diagonal_pair_is_connected() {
        let mut g = GridSet::empty(GridSpec::centered(4, 1.0).unwrap());
        g.set(1, 1, true);
        g.set(2, 2, true);
        assert_eq!(components(&g).len(), 1);
    }

    #[test]
    fn two_disks() {
        let spec = GridSpec::centered(64, 1.0).unwrap();
        let g = GridSet::from_fn(spec, |p| {
            p.dist(Point::new(-15.0, 0.0)) < 8.0 || p.dist(Point::new(15.0, 3.0)) < 5.0
        });
        let c = components(&g);
        assert_eq!(c.len(), 2);
        assert_eq!(c.iter().map(|s| s.count()).sum::<usize>(), g.count());
        assert!(!c[0].overlaps(&c[1]).unwrap());
    }
}

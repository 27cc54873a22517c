use super::*;

/// One data qubit moved along a diagonal: `source → channel → dest`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SwapMove {
    pub source: Site,
    pub channel: Site,
    pub dest: Site,
}

/// What happens in one expanded round.
#[derive(Clone, Debug)]
pub struct RoundPlan {
    pub round: u32,
    /// Index into [`Program::frames`].
    pub frame: usize,
    /// Per site: holds quantum information when the round starts.
    pub live_before: Vec<bool>,
    /// Per site: for syndromes measured this round, the data neighbors in
    /// schedule order.
    pub extract: Vec<Option<Vec<(Direction, Site)>>>,
    pub swaps: Vec<SwapMove>,
    /// Swaps whose path leaves the lattice.
    pub broken_swaps: Vec<Site>,
}

impl RoundPlan {
    pub fn support(&self, p: &Program, s: Site) -> Option<impl Iterator<Item = Site> + '_> {
        self.extract[p.index(s)].as_ref().map(|v| v.iter().map(|(_, d)| *d))
    }

    pub fn is_channel(&self, s: Site) -> bool {
        self.swaps.iter().any(|m| m.channel == s)
    }

    pub fn is_dest(&self, s: Site) -> bool {
        self.swaps.iter().any(|m| m.dest == s)
    }

    pub fn is_source(&self, s: Site) -> bool {
        self.swaps.iter().any(|m| m.source == s)
    }
}

impl Program {
    /// Derives per-round activity for an expanded frame sequence.
    pub fn plan(&self, frames: &[usize]) -> Vec<RoundPlan> {
        let schedule = self.schedule();
        let mut live = vec![false; self.num_sites()];
        let mut out = Vec::with_capacity(frames.len());
        for (round, &fi) in frames.iter().enumerate() {
            let frame = &self.frames[fi];
            let mut swaps = Vec::new();
            let mut broken_swaps = Vec::new();
            for (k, d) in frame.cells.iter().enumerate() {
                if let Command::Swap(diag) = d.command {
                    let source = self.site(k);
                    let channel = self.neighbor(source, diag.channel());
                    let dest = channel.and_then(|c| self.neighbor(c, diag.turn()));
                    match (channel, dest) {
                        (Some(channel), Some(dest)) => swaps.push(SwapMove { source, channel, dest }),
                        _ => broken_swaps.push(source),
                    }
                }
            }
            let eligible = |n: Site| {
                let c = frame.cells[self.index(n)].command;
                !matches!(c, Command::Inactive | Command::Swap(_))
                    && (live[self.index(n)] || c.add_basis().is_some())
            };
            let extract = frame
                .cells
                .iter()
                .enumerate()
                .map(|(k, d)| {
                    let s = self.site(k);
                    if s.kind() == SiteKind::Data
                        || d.command != Command::Active
                        || swaps.iter().any(|m| m.channel == s)
                    {
                        return None;
                    }
                    let support: Vec<_> = schedule
                        .0
                        .iter()
                        .filter_map(|&dir| self.neighbor(s, dir).filter(|&n| eligible(n)).map(|n| (dir, n)))
                        .collect();
                    (!support.is_empty()).then_some(support)
                })
                .collect();
            out.push(RoundPlan { round: round as u32, frame: fi, live_before: live.clone(), extract, swaps, broken_swaps });
            live = self.live_after(frame);
        }
        out
    }
}

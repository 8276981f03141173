from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from classimpact.corpus import ChangeKind, Commit, FileChange, Requirement, RequirementKind, build_corpus

FIXTURES = Path(__file__).parent / "fixtures"
T0 = datetime(2020, 1, 1, tzinfo=timezone.utc)


def at(hours):
    return T0 + timedelta(hours=hours)


def commit(cid, hours, message="", added=(), modified=(), deleted=(), parents=None):
    files = tuple(FileChange(p, ChangeKind.ADDED) for p in added) \
        + tuple(FileChange(p, ChangeKind.MODIFIED) for p in modified) \
        + tuple(FileChange(p, ChangeKind.DELETED) for p in deleted)
    return Commit(cid, tuple(parents or ()), at(hours), message, files)


def requirement(key, hours, title="", description="", kind=RequirementKind.NEW_FEATURE, release=None):
    return Requirement(key, kind, title, description, at(hours), release)


def chain(*commits):
    """Give each commit the previous one as parent."""
    out = []
    for c in commits:
        parents = (out[-1].id,) if out else ()
        out.append(Commit(c.id, parents, c.timestamp, c.message, c.file_changes))
    return out


@pytest.fixture
def accumulo():
    """Four feature requests and the classes their commits modified."""
    base = ["monitor/servlets/TablesServlet.java", "monitor/util/Table.java", "master/Master.java",
            "core/ThriftTransportKeyTest.java", "core/ClientOpts.java",
            "test/MapReduceClientOnDefaultTable.java", "test/MapReduceClientOnRequiredTable.java",
            "shell/Shell.java"]
    commits = chain(
        commit("c0", 0, "import", added=base + ["README.md"]),
        commit("c1", 10, "ACCUMULO-2181 organize monitor tables by namespace",
               modified=["monitor/servlets/TablesServlet.java", "monitor/util/Table.java"]),
        commit("c2", 20, "ACCUMULO-2815 kerberos client auth",
               modified=["core/ThriftTransportKeyTest.java", "core/ClientOpts.java"]),
        commit("c3", 30, "ACCUMULO-2998 wait for balance", modified=["master/Master.java"]),
        commit("c4", 40, "[ACCUMULO-3513] delegation tokens",
               modified=["core/ThriftTransportKeyTest.java", "test/MapReduceClientOnDefaultTable.java",
                         "test/MapReduceClientOnRequiredTable.java"]),
        commit("c5", 50, "refactor whitespace", modified=["shell/Shell.java"]),
    )
    reqs = [
        requirement("ACCUMULO-2181", 5, "Organize tables on monitor page by namespace",
                    "Improve the look and feel of the monitor by using Twitter's bootstrap.", release="1.7"),
        requirement("ACCUMULO-2815", 15, "Support for Kerberos client authentication.",
                    "Leverage SASL transport provided by Thrift which can speak GSSAPI.", release="1.7"),
        requirement("ACCUMULO-2998", 25, "Provide a mechanism to allow clients to wait for balance",
                    "Wait for the balancer to run and find no work to do after creating a bunch of splits.",
                    release="1.7"),
        requirement("ACCUMULO-3513", 35, "Add delegation token support for kerberos configurations.",
                    "Generate secret keys internally and distribute them among the nodes.", release="1.7"),
        requirement("ACCUMULO-4000", 45, "Unimplemented request", "Nobody committed this.", release="1.7"),
    ]
    return build_corpus("ACCUMULO", commits, reqs, ["1.7"])


@pytest.fixture
def locality():
    """Six requirements touching classes A, B, C with the pattern of the locality table."""
    pattern = {"A": "XXXX00", "B": "00XXX0", "C": "0000XX"}
    files = {k: f"pkg/{k}.java" for k in pattern}
    commits = [commit("c00", 0, "init", added=sorted(files.values()))]
    reqs = []
    for i in range(6):
        touched = [files[k] for k in sorted(pattern) if pattern[k][i] == "X"]
        commits.append(commit(f"c{i + 1:02d}", 10 * (i + 1) + 1, f"P-{i + 1} work", modified=touched))
        reqs.append(requirement(f"P-{i + 1}", 10 * (i + 1), f"feature {i + 1}", "text"))
    commits.append(commit("c07", 80, "P-7 probe", modified=[files["A"]]))
    reqs.append(requirement("P-7", 75, "probe", "text"))
    return build_corpus("P", chain(*commits), reqs), files

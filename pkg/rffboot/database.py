"""Storage for experiment history.

Models subclass ``database.base`` and talk to the module-level ``session``.
Nothing touches the disk until :meth:`Database.connect` is called.
"""

import os

from sqlalchemy import create_engine
from sqlalchemy.engine import Engine
from sqlalchemy.orm import declarative_base, scoped_session, sessionmaker

from rffboot.exceptions import ConfigException

DB_STRING: str = os.getenv("RFFBOOT_DB_STRING", "sqlite:///rffboot.db")


def test_dotenv() -> None:
    if type(DB_STRING) != str or not DB_STRING.strip():
        raise ConfigException("RFFBOOT_DB_STRING is empty.")


test_dotenv()


session = scoped_session(sessionmaker())


class Database:
    def __init__(self, url: str):
        self.base = declarative_base()
        self.url = url
        self.db: Engine = create_engine(url)
        session.configure(bind=self.db)

    def connect(self, url: str = None) -> None:
        """Bind the session and create missing tables.

        :param url: Optional SQLAlchemy URL overriding the current one.
        """
        if url is not None and url != self.url:
            session.remove()
            self.url = url
            self.db = create_engine(url)
            session.configure(bind=self.db)
        self.base.metadata.create_all(self.db)


database = Database(DB_STRING)
